#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qx/types.hpp"

namespace qx {

/// How a rule span is closed.
///  - start_to_next_start: a span runs up to the word before the next start
///    match, or to the end of the text.
///  - start_to_end_match: a span runs to the word holding the first end
///    match after the start. When no end match precedes the next start, it
///    falls back to start_to_next_start.
enum class RuleMode { start_to_next_start, start_to_end_match };

std::string_view to_string(RuleMode mode) noexcept;

/// Question start/end patterns for the rule-based baseline. Patterns use
/// Perl syntax (lookbehind is available) and are compiled on construction.
/// Immutable and cheap to copy.
class RuleSet {
 public:
  /// Throws ParseError (line 0) when there is no start pattern or a pattern
  /// does not compile.
  RuleSet(std::vector<std::string> start_patterns,
          std::vector<std::string> end_patterns, RuleMode mode);

  /// Parses the ruleset text format:
  ///   # comment
  ///   start: <pattern>
  ///   end: <pattern>
  ///   mode: start_to_next_start | start_to_end_match
  /// Errors name the 1-based line and, for bad patterns, the column.
  static RuleSet parse(std::string_view content);
  static RuleSet load(const std::filesystem::path& path);

  /// The bundled ruleset (identical to data/default.rules).
  static const RuleSet& builtin_default();
  static std::string_view builtin_default_text() noexcept;

  const std::vector<std::string>& start_patterns() const noexcept {
    return start_patterns_;
  }
  const std::vector<std::string>& end_patterns() const noexcept {
    return end_patterns_;
  }
  RuleMode mode() const noexcept { return mode_; }

  struct Compiled;
  const Compiled& compiled() const noexcept { return *compiled_; }

 private:
  std::vector<std::string> start_patterns_;
  std::vector<std::string> end_patterns_;
  RuleMode mode_;
  std::shared_ptr<const Compiled> compiled_;
};

/// Rule-based question extraction. Match offsets are snapped outward to
/// word boundaries; returned spans carry their source text and satisfy the
/// span-list invariants.
std::vector<QuestionSpan> rule_extract(std::string_view text,
                                       const RuleSet& rules);

}  // namespace qx
