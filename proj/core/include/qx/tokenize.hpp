#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qx/types.hpp"

namespace qx {

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};
}  // namespace detail

/// Subword vocabulary. Entry ids are line numbers (0-based) of the file it
/// was loaded from.
class Vocabulary {
 public:
  struct Options {
    std::string continuation_prefix = "##";
    std::string unknown_token = "[UNK]";
    bool lowercase = false;
  };

  /// Throws ContractViolation when the invariants do not hold: entries
  /// non-empty, no empty entry, unknown token present.
  explicit Vocabulary(std::vector<std::string> entries);
  Vocabulary(std::vector<std::string> entries, Options options);

  /// One entry per line, UTF-8. A trailing '\r' is stripped.
  static Vocabulary load(const std::filesystem::path& path);
  static Vocabulary load(const std::filesystem::path& path, Options options);

  bool contains(std::string_view piece) const noexcept;
  /// -1 when absent.
  long id(std::string_view piece) const noexcept;

  const std::vector<std::string>& entries() const noexcept { return entries_; }
  const Options& options() const noexcept { return options_; }
  const std::string& continuation_prefix() const noexcept {
    return options_.continuation_prefix;
  }
  const std::string& unknown_token() const noexcept {
    return options_.unknown_token;
  }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, long, detail::StringHash, std::equal_to<>>
      ids_;
  Options options_;
};

/// Half-open range of subtoken indices.
struct SubtokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const SubtokenRange&) const = default;
};

/// word_to_subtokens[w] is the contiguous subtoken range derived from word w.
struct Alignment {
  std::vector<SubtokenRange> word_to_subtokens;

  std::size_t word_count() const noexcept { return word_to_subtokens.size(); }
  std::size_t subtoken_count() const noexcept {
    return word_to_subtokens.empty() ? 0 : word_to_subtokens.back().end;
  }
  bool operator==(const Alignment&) const = default;
};

/// True iff ranges are non-empty, contiguous and cover [0, subtoken_count).
bool is_partition(const Alignment& alignment) noexcept;

/// Maximal runs of non-whitespace bytes. Whitespace is the ASCII set
/// " \t\n\r\f\v"; punctuation stays attached to its word.
std::vector<Token> word_tokenize(std::string_view text);

/// Greedy longest-match subword split of one word. Pieces after the first
/// carry the continuation prefix. Falls back to {unknown_token} when some
/// position has no matching entry. Splits only on UTF-8 code point
/// boundaries.
std::vector<std::string> subword_tokenize(std::string_view word,
                                          const Vocabulary& vocab);

struct TokenizedText {
  std::vector<Token> words;
  /// Subtoken text is the raw source slice (no continuation prefix), so the
  /// Token offset invariant holds for subtokens as well.
  std::vector<Token> subtokens;
  /// Vocabulary pieces, parallel to `subtokens`; this is what a model sees.
  std::vector<std::string> pieces;
  Alignment alignment;
};

TokenizedText tokenize_full(std::string_view text, const Vocabulary& vocab);

}  // namespace qx
