#include "qx/types.hpp"

#include <string>

#include "qx/error.hpp"
#include "qx/labels.hpp"
#include "qx/tokenize.hpp"

namespace qx {

std::string_view to_string(BioTag tag) noexcept {
  switch (tag) {
    case BioTag::B:
      return "B-Question";
    case BioTag::I:
      return "I-Question";
    case BioTag::O:
      return "O";
  }
  return "O";
}

std::optional<BioTag> parse_bio_tag(std::string_view s) noexcept {
  if (s == "B-Question") return BioTag::B;
  if (s == "I-Question") return BioTag::I;
  if (s == "O") return BioTag::O;
  return std::nullopt;
}

BioTag bio_tag_from_string(std::string_view s) {
  if (auto tag = parse_bio_tag(s)) return *tag;
  throw ParseError(0, "invalid BIO tag \"" + std::string(s) +
                          "\" (expected B-Question, I-Question or O)");
}

std::optional<std::size_t> first_orphan_inside(
    const TagSequence& seq) noexcept {
  BioTag prev = BioTag::O;
  for (std::size_t i = 0; i < seq.tags.size(); ++i) {
    if (seq.tags[i] == BioTag::I && prev == BioTag::O) return i;
    prev = seq.tags[i];
  }
  return std::nullopt;
}

bool is_well_formed_iob2(const TagSequence& seq) noexcept {
  return !first_orphan_inside(seq).has_value();
}

std::string_view to_string(ExampleSource source) noexcept {
  switch (source) {
    case ExampleSource::manual:
      return "manual";
    case ExampleSource::augmented:
      return "augmented";
    case ExampleSource::ocr:
      return "ocr";
  }
  return "manual";
}

std::optional<ExampleSource> parse_example_source(
    std::string_view s) noexcept {
  if (s == "manual") return ExampleSource::manual;
  if (s == "augmented") return ExampleSource::augmented;
  if (s == "ocr") return ExampleSource::ocr;
  return std::nullopt;
}

std::vector<std::string> validate_span_list(
    const std::vector<QuestionSpan>& spans) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.start_word > s.end_word) {
      out.push_back("spans[" + std::to_string(i) +
                    "]: start_word > end_word (" +
                    std::to_string(s.start_word) + " > " +
                    std::to_string(s.end_word) + ")");
    }
    if (i == 0) continue;
    const auto& p = spans[i - 1];
    if (s.start_word < p.start_word) {
      out.push_back("spans[" + std::to_string(i) +
                    "]: not sorted by start_word");
    } else if (s.start_word <= p.end_word) {
      out.push_back("spans[" + std::to_string(i - 1) + "] and spans[" +
                    std::to_string(i) + "]: overlap at word " +
                    std::to_string(s.start_word));
    }
  }
  return out;
}

std::vector<std::string> validate_example(const AnnotatedExample& example) {
  auto out = validate_span_list(example.spans);
  const auto words = word_tokenize(example.text);
  for (std::size_t i = 0; i < example.spans.size(); ++i) {
    const auto& s = example.spans[i];
    if (s.start_word > s.end_word) continue;  // already reported
    if (s.end_word >= words.size()) {
      out.push_back("spans[" + std::to_string(i) + "]: end_word " +
                    std::to_string(s.end_word) + " out of range (" +
                    std::to_string(words.size()) + " words)");
      continue;
    }
    if (s.text != span_text(example.text, words, s.start_word, s.end_word)) {
      out.push_back("spans[" + std::to_string(i) +
                    "]: text mismatch with source words");
    }
  }
  return out;
}

}  // namespace qx
