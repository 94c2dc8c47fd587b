#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qx/types.hpp"

namespace qx {

// ---------------------------------------------------------------------------
// OCR ingestion
// ---------------------------------------------------------------------------

struct BoundingBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool valid() const noexcept { return x0 < x1 && y0 < y1; }
  double center_y() const noexcept { return (y0 + y1) / 2.0; }
  bool operator==(const BoundingBox&) const = default;
};

struct OcrWord {
  std::string text;
  BoundingBox bbox;
  std::size_t page = 0;
  bool operator==(const OcrWord&) const = default;
};

struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const CharRange&) const = default;
};

struct LinearizedText {
  std::string text;
  /// provenance[i] is the byte range of input word i inside `text`.
  std::vector<CharRange> provenance;
};

/// Reading-order reconstruction. Two words share a line when the vertical
/// center of one lies inside the other's y-extent (lines are the connected
/// components of that relation, per page). Lines are ordered by page then
/// top edge, words within a line by x0. Words are joined by single spaces
/// and lines by '\n'. Throws ContractViolation on an invalid bbox or empty
/// word text.
LinearizedText ocr_to_text(const std::vector<OcrWord>& words);

/// Parses {"pages":[{"words":[{"text":...,"bbox":[x0,y0,x1,y1]}]}]}.
std::vector<OcrWord> parse_ocr_json(const nlohmann::json& j);
std::vector<OcrWord> load_ocr_json(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

enum class DatasetFormat { jsonl, conll };

DatasetFormat parse_dataset_format(std::string_view s);
std::string_view to_string(DatasetFormat format) noexcept;

/// JSONL record: {"id":..,"text":..,"spans":[[char_start,char_end],..],
/// "source":..}. Offsets are UTF-8 byte offsets, end exclusive, and must
/// fall on word boundaries. Unknown keys are ignored on read.
nlohmann::ordered_json example_to_jsonl(const AnnotatedExample& example);
/// `line` is used in error messages only.
AnnotatedExample example_from_jsonl(const nlohmann::json& j,
                                    std::size_t line = 0);

/// CoNLL block:
///   # id = <id>
///   # source = <source>
///   <token>\t<tag>
///   ...
///   <blank line>
/// Text is rebuilt by joining tokens with single spaces, so CoNLL is
/// lossless only for single-space-separated text.
std::string example_to_conll(const AnnotatedExample& example);

/// Streaming readers: invoke `sink` once per example, in file order. Parse
/// errors carry 1-based line numbers.
void read_jsonl(std::istream& in,
                const std::function<void(AnnotatedExample)>& sink);
void read_conll(std::istream& in,
                const std::function<void(AnnotatedExample)>& sink);

void write_example(std::ostream& out, const AnnotatedExample& example,
                   DatasetFormat format);

std::vector<AnnotatedExample> read_dataset(const std::filesystem::path& path,
                                           DatasetFormat format);
void write_dataset(const std::vector<AnnotatedExample>& examples,
                   const std::filesystem::path& path, DatasetFormat format);

/// Lines of a UTF-8 text file, trailing '\r' removed.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace qx
