#include "qx/tokenize.hpp"

#include <fstream>
#include <string>

#include "qx/error.hpp"

namespace qx {
namespace {

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// True when byte offset `i` of `s` starts a UTF-8 code point (or is the end).
bool on_code_point_boundary(std::string_view s, std::size_t i) noexcept {
  return i >= s.size() ||
         (static_cast<unsigned char>(s[i]) & 0xC0u) != 0x80u;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Greedy split returning byte lengths of each piece within `word`; empty
// when some position has no vocabulary match.
std::vector<std::size_t> greedy_piece_lengths(std::string_view word,
                                              const Vocabulary& vocab) {
  const std::string folded =
      vocab.options().lowercase ? ascii_lower(word) : std::string(word);
  const std::string_view w = folded;
  const auto& prefix = vocab.continuation_prefix();

  std::vector<std::size_t> lengths;
  std::string candidate;
  std::size_t start = 0;
  while (start < w.size()) {
    std::size_t end = w.size();
    bool found = false;
    while (end > start) {
      if (on_code_point_boundary(w, end)) {
        candidate.clear();
        if (start > 0) candidate += prefix;
        candidate.append(w.substr(start, end - start));
        if (vocab.contains(candidate)) {
          found = true;
          break;
        }
      }
      --end;
    }
    if (!found) return {};
    lengths.push_back(end - start);
    start = end;
  }
  return lengths;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> entries)
    : Vocabulary(std::move(entries), Options{}) {}

Vocabulary::Vocabulary(std::vector<std::string> entries, Options options)
    : entries_(std::move(entries)), options_(std::move(options)) {
  if (entries_.empty()) throw ContractViolation("vocabulary is empty");
  ids_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].empty()) {
      throw ContractViolation("vocabulary entry " + std::to_string(i) +
                              " is empty");
    }
    // First occurrence keeps its id.
    ids_.emplace(entries_[i], static_cast<long>(i));
  }
  if (!contains(options_.unknown_token)) {
    throw ContractViolation("vocabulary lacks unknown token \"" +
                            options_.unknown_token + "\"");
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return load(path, Options{});
}

Vocabulary Vocabulary::load(const std::filesystem::path& path,
                            Options options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary file " + path.string());
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    entries.push_back(line);
  }
  // A trailing newline does not produce an extra entry.
  while (!entries.empty() && entries.back().empty()) entries.pop_back();
  return Vocabulary(std::move(entries), std::move(options));
}

bool Vocabulary::contains(std::string_view piece) const noexcept {
  return ids_.find(piece) != ids_.end();
}

long Vocabulary::id(std::string_view piece) const noexcept {
  auto it = ids_.find(piece);
  return it == ids_.end() ? -1 : it->second;
}

bool is_partition(const Alignment& alignment) noexcept {
  std::size_t next = 0;
  for (const auto& r : alignment.word_to_subtokens) {
    if (r.begin != next || r.end <= r.begin) return false;
    next = r.end;
  }
  return true;
}

std::vector<Token> word_tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    out.push_back(Token{std::string(text.substr(start, i - start)), start, i,
                        out.size()});
  }
  return out;
}

std::vector<std::string> subword_tokenize(std::string_view word,
                                          const Vocabulary& vocab) {
  if (word.empty()) throw ContractViolation("subword_tokenize: empty word");
  const auto lengths = greedy_piece_lengths(word, vocab);
  if (lengths.empty()) return {vocab.unknown_token()};

  std::vector<std::string> pieces;
  pieces.reserve(lengths.size());
  const std::string folded = vocab.options().lowercase
                                 ? ascii_lower(word)
                                 : std::string(word);
  std::size_t pos = 0;
  for (std::size_t len : lengths) {
    std::string piece = pos > 0 ? vocab.continuation_prefix() : std::string{};
    piece += folded.substr(pos, len);
    pieces.push_back(std::move(piece));
    pos += len;
  }
  return pieces;
}

TokenizedText tokenize_full(std::string_view text, const Vocabulary& vocab) {
  TokenizedText out;
  out.words = word_tokenize(text);
  out.alignment.word_to_subtokens.reserve(out.words.size());
  for (const auto& word : out.words) {
    const std::size_t first = out.subtokens.size();
    const auto lengths = greedy_piece_lengths(word.text, vocab);
    if (lengths.empty()) {
      out.subtokens.push_back(word);
      out.pieces.push_back(vocab.unknown_token());
    } else {
      const auto pieces = subword_tokenize(word.text, vocab);
      std::size_t pos = 0;
      for (std::size_t k = 0; k < lengths.size(); ++k) {
        out.subtokens.push_back(Token{word.text.substr(pos, lengths[k]),
                                      word.char_start + pos,
                                      word.char_start + pos + lengths[k],
                                      word.word_index});
        out.pieces.push_back(pieces[k]);
        pos += lengths[k];
      }
    }
    out.alignment.word_to_subtokens.push_back({first, out.subtokens.size()});
  }
  return out;
}

}  // namespace qx
