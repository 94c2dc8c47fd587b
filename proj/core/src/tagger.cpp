#include "qx/tagger.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <string>
#include <thread>

#include "qx/error.hpp"

namespace qx {
namespace {

TagSequence tag_with(const RuleTagger& t, const Document& doc,
                     const std::vector<Token>& words) {
  return encode_tags(rule_extract(doc.text, t.rules), words.size());
}

TagSequence tag_with(const OracleTagger& t, const Document& doc,
                     const std::vector<Token>& words) {
  auto it = t.table.find(doc.id);
  if (it == t.table.end()) {
    throw ContractViolation("oracle tagger has no tags for document \"" +
                            doc.id + "\"");
  }
  if (it->second.size() != words.size()) {
    throw ContractViolation("oracle tags for \"" + doc.id + "\" have " +
                            std::to_string(it->second.size()) +
                            " entries for " + std::to_string(words.size()) +
                            " words");
  }
  TagSequence out = it->second;
  out.level = TagLevel::word;
  return out;
}

TagSequence tag_with(const RemoteTagger& t, const Document& doc,
                     const std::vector<Token>& words) {
  t.validate();
  const auto tok = tokenize_full(doc.text, *t.vocab);
  if (tok.words.size() != words.size()) {
    throw ContractViolation("remote tagger: word tokens do not belong to document \"" +
                            doc.id + "\"");
  }
  if (tok.pieces.empty()) return TagSequence{{}, TagLevel::word};

  const auto windows = chunk_windows(tok.pieces.size(), t.max_len, t.stride);
  std::vector<TagSequence> window_tags;
  window_tags.reserve(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) {
    TagRequest request;
    request.id = windows.size() == 1 ? doc.id : doc.id + "#" + std::to_string(k);
    request.tokens.assign(tok.pieces.begin() + windows[k].begin,
                          tok.pieces.begin() + windows[k].end);
    window_tags.push_back(remote_tag_subtokens(t, request));
  }
  const TagSequence merged =
      merge_windows(windows, window_tags, tok.pieces.size());
  return collapse_tags(merged, tok.alignment);
}

}  // namespace

void RemoteTagger::validate() const {
  if (timeout.count() <= 0) throw ContractViolation("remote timeout must be > 0 ms");
  if (!vocab) throw ContractViolation("remote tagger needs a vocabulary");
  if (stride == 0 || stride >= max_len) {
    throw ContractViolation("chunking requires 0 < stride < max_len");
  }
  if (max_in_flight == 0) throw ContractViolation("max_in_flight must be > 0");
}

std::vector<SubtokenRange> chunk_windows(std::size_t n_subtokens,
                                         std::size_t max_len,
                                         std::size_t stride) {
  if (stride == 0 || stride >= max_len) {
    throw ContractViolation("chunk_windows: requires 0 < stride < max_len");
  }
  std::vector<SubtokenRange> windows;
  if (n_subtokens == 0) return windows;
  const std::size_t step = max_len - stride;
  for (std::size_t begin = 0;; begin += step) {
    const std::size_t end = std::min(begin + max_len, n_subtokens);
    windows.push_back({begin, end});
    if (end == n_subtokens) break;
  }
  return windows;
}

std::vector<std::vector<Token>> chunk_long_input(
    const std::vector<Token>& subtokens, std::size_t max_len,
    std::size_t stride) {
  std::vector<std::vector<Token>> out;
  for (const auto& w : chunk_windows(subtokens.size(), max_len, stride)) {
    out.emplace_back(subtokens.begin() + w.begin, subtokens.begin() + w.end);
  }
  return out;
}

TagSequence merge_windows(const std::vector<SubtokenRange>& windows,
                          const std::vector<TagSequence>& window_tags,
                          std::size_t n_subtokens) {
  if (windows.size() != window_tags.size()) {
    throw ContractViolation("merge_windows: one tag sequence per window required");
  }
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (window_tags[k].size() != windows[k].size()) {
      throw ContractViolation("merge_windows: window " + std::to_string(k) +
                              " has " + std::to_string(window_tags[k].size()) +
                              " tags for " + std::to_string(windows[k].size()) +
                              " positions");
    }
  }
  TagSequence out{std::vector<BioTag>(n_subtokens, BioTag::O), TagLevel::subtoken};
  for (std::size_t p = 0; p < n_subtokens; ++p) {
    std::optional<std::size_t> best;
    std::size_t best_distance = 0;
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto& w = windows[k];
      if (p < w.begin || p >= w.end) continue;
      const std::size_t distance = std::min(p - w.begin, w.end - p);
      if (!best || distance > best_distance) {
        best = k;
        best_distance = distance;
      }
    }
    if (!best) {
      throw ContractViolation("merge_windows: position " + std::to_string(p) +
                              " is not covered by any window");
    }
    out.tags[p] = window_tags[*best].tags[p - windows[*best].begin];
  }
  return out;
}

TagSequence tag(const Tagger& tagger, const Document& doc,
                const std::vector<Token>& words) {
  return std::visit([&](const auto& t) { return tag_with(t, doc, words); },
                    tagger);
}

std::vector<QuestionSpan> extract(const Tagger& tagger, const Document& doc,
                                  RepairPolicy policy) {
  const auto words = word_tokenize(doc.text);
  if (words.empty()) return {};
  auto spans = decode_spans(tag(tagger, doc, words), policy);
  attach_text(spans, doc.text, words);
  return spans;
}

std::vector<std::vector<QuestionSpan>> extract_many(
    const Tagger& tagger, const std::vector<Document>& docs,
    RepairPolicy policy) {
  std::vector<std::vector<QuestionSpan>> out(docs.size());
  const auto* remote = std::get_if<RemoteTagger>(&tagger);
  const std::size_t workers =
      remote ? std::min(remote->max_in_flight, docs.size()) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      out[i] = extract(tagger, docs[i], policy);
    }
    return out;
  }

  std::vector<std::exception_ptr> errors(docs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < docs.size() && !failed; i = next++) {
      try {
        out[i] = extract(tagger, docs[i], policy);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace qx
