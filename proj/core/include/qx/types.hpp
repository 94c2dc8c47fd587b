#pragma once

// Shared domain types for question extraction.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qx {

/// A word- or subword-level unit with byte offsets into the source text.
struct Token {
  std::string text;
  std::size_t char_start = 0;  // inclusive
  std::size_t char_end = 0;    // exclusive
  std::size_t word_index = 0;

  bool operator==(const Token&) const = default;
};

enum class BioTag { B, I, O };

/// "B-Question", "I-Question" or "O".
std::string_view to_string(BioTag tag) noexcept;
/// Accepts exactly the three serialized forms; anything else is nullopt.
std::optional<BioTag> parse_bio_tag(std::string_view s) noexcept;
/// Like parse_bio_tag but throws ParseError.
BioTag bio_tag_from_string(std::string_view s);

enum class TagLevel { word, subtoken };

struct TagSequence {
  std::vector<BioTag> tags;
  TagLevel level = TagLevel::word;

  std::size_t size() const noexcept { return tags.size(); }
  bool operator==(const TagSequence&) const = default;
};

/// True iff every I is preceded by a B or an I.
bool is_well_formed_iob2(const TagSequence& seq) noexcept;
/// Index of the first I that opens a run, if any.
std::optional<std::size_t> first_orphan_inside(const TagSequence& seq) noexcept;

/// One extracted question: an inclusive range of word indices.
struct QuestionSpan {
  std::size_t start_word = 0;
  std::size_t end_word = 0;
  std::string text;

  std::size_t length() const noexcept { return end_word - start_word + 1; }
  bool operator==(const QuestionSpan&) const = default;
};

enum class ExampleSource { manual, augmented, ocr };

std::string_view to_string(ExampleSource source) noexcept;
std::optional<ExampleSource> parse_example_source(std::string_view s) noexcept;

struct AnnotatedExample {
  std::string id;
  std::string text;
  std::vector<QuestionSpan> spans;
  ExampleSource source = ExampleSource::manual;

  bool operator==(const AnnotatedExample&) const = default;
};

/// Checks sortedness, non-overlap and start <= end of a span list. Returns
/// human-readable violations; an empty result means the list is valid.
std::vector<std::string> validate_span_list(
    const std::vector<QuestionSpan>& spans);

/// Empty iff every AnnotatedExample invariant holds. Each entry names the
/// field and the rule broken.
std::vector<std::string> validate_example(const AnnotatedExample& example);

}  // namespace qx
