#include "qx/labels.hpp"

#include <string>

#include "qx/error.hpp"

namespace qx {

TagSequence project_tags(const TagSequence& word_tags,
                         const Alignment& alignment) {
  if (word_tags.size() != alignment.word_count()) {
    throw ContractViolation(
        "project_tags: " + std::to_string(word_tags.size()) +
        " word tags for " + std::to_string(alignment.word_count()) +
        " aligned words");
  }
  TagSequence out{{}, TagLevel::subtoken};
  out.tags.reserve(alignment.subtoken_count());
  for (std::size_t w = 0; w < word_tags.size(); ++w) {
    const BioTag parent = word_tags.tags[w];
    const BioTag continuation = parent == BioTag::O ? BioTag::O : BioTag::I;
    const auto& range = alignment.word_to_subtokens[w];
    for (std::size_t k = range.begin; k < range.end; ++k) {
      out.tags.push_back(k == range.begin ? parent : continuation);
    }
  }
  return out;
}

TagSequence collapse_tags(const TagSequence& subtoken_tags,
                          const Alignment& alignment) {
  if (subtoken_tags.size() != alignment.subtoken_count()) {
    throw ContractViolation(
        "collapse_tags: " + std::to_string(subtoken_tags.size()) +
        " subtoken tags for " + std::to_string(alignment.subtoken_count()) +
        " aligned subtokens");
  }
  TagSequence out{{}, TagLevel::word};
  out.tags.reserve(alignment.word_count());
  for (const auto& range : alignment.word_to_subtokens) {
    if (range.end <= range.begin) {
      throw ContractViolation("collapse_tags: empty subtoken range");
    }
    out.tags.push_back(subtoken_tags.tags[range.begin]);
  }
  return out;
}

std::vector<QuestionSpan> decode_spans(const TagSequence& tags,
                                       RepairPolicy policy) {
  if (policy == RepairPolicy::strict) {
    if (auto bad = first_orphan_inside(tags)) {
      throw MalformedTags(*bad, "I-Question at index " +
                                    std::to_string(*bad) +
                                    " does not continue a question");
    }
  }
  std::vector<QuestionSpan> spans;
  bool open = false;
  for (std::size_t i = 0; i < tags.tags.size(); ++i) {
    switch (tags.tags[i]) {
      case BioTag::B:
        spans.push_back({i, i, {}});
        open = true;
        break;
      case BioTag::I:
        if (open) {
          spans.back().end_word = i;
        } else {
          // Orphan I under iob2_repair opens a span.
          spans.push_back({i, i, {}});
          open = true;
        }
        break;
      case BioTag::O:
        open = false;
        break;
    }
  }
  return spans;
}

TagSequence encode_tags(const std::vector<QuestionSpan>& spans,
                        std::size_t n_words) {
  TagSequence out{std::vector<BioTag>(n_words, BioTag::O), TagLevel::word};
  std::size_t next_free = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.start_word > s.end_word || s.end_word >= n_words) {
      throw ContractViolation("encode_tags: span " + std::to_string(i) +
                              " [" + std::to_string(s.start_word) + ", " +
                              std::to_string(s.end_word) +
                              "] out of range for " + std::to_string(n_words) +
                              " words");
    }
    if (i > 0 && s.start_word < next_free) {
      throw ContractViolation("encode_tags: span " + std::to_string(i) +
                              " overlaps or precedes span " +
                              std::to_string(i - 1));
    }
    out.tags[s.start_word] = BioTag::B;
    for (std::size_t w = s.start_word + 1; w <= s.end_word; ++w) {
      out.tags[w] = BioTag::I;
    }
    next_free = s.end_word + 1;
  }
  return out;
}

std::string span_text(std::string_view text, const std::vector<Token>& words,
                      std::size_t start_word, std::size_t end_word) {
  if (start_word > end_word || end_word >= words.size()) {
    throw ContractViolation("span_text: word range out of bounds");
  }
  const std::size_t begin = words[start_word].char_start;
  const std::size_t end = words[end_word].char_end;
  return std::string(text.substr(begin, end - begin));
}

void attach_text(std::vector<QuestionSpan>& spans, std::string_view text,
                 const std::vector<Token>& words) {
  for (auto& s : spans) s.text = span_text(text, words, s.start_word, s.end_word);
}

}  // namespace qx
