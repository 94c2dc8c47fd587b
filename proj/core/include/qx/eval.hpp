#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qx/types.hpp"

namespace qx {

/// When a predicted question counts as correctly identified.
struct MatchCriterion {
  enum class Kind { exact_span, exact_text_normalized, iou };

  Kind kind = Kind::exact_text_normalized;
  double iou_threshold = 0.5;  // only read for Kind::iou

  static MatchCriterion exact_span() { return {Kind::exact_span, 0.5}; }
  static MatchCriterion exact_text() {
    return {Kind::exact_text_normalized, 0.5};
  }
  /// Throws ContractViolation unless 0 < threshold <= 1.
  static MatchCriterion iou(double threshold);

  /// "exact", "text" or "iou:<t>".
  static MatchCriterion parse(const std::string& s);
  std::string to_string() const;
};

/// Whitespace collapsed to single spaces, trimmed, ASCII case-folded.
std::string normalize_question_text(std::string_view s);

/// |overlap| / |union| of the two word ranges.
double word_iou(const QuestionSpan& a, const QuestionSpan& b) noexcept;

bool spans_match(const QuestionSpan& pred, const QuestionSpan& gold,
                 const MatchCriterion& criterion);

/// Greedy one-to-one matching in gold order. Among unmatched candidates,
/// prefers the larger word overlap, then the smaller predicted start.
/// Returns (pred_index, gold_index) pairs sorted by gold index.
std::vector<std::pair<std::size_t, std::size_t>> match_spans(
    const std::vector<QuestionSpan>& pred,
    const std::vector<QuestionSpan>& gold, const MatchCriterion& criterion);

struct DocumentCounts {
  std::string id;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  bool operator==(const DocumentCounts&) const = default;
};

struct EvalReport {
  std::size_t true_positives = 0;
  std::size_t predicted_total = 0;
  std::size_t gold_total = 0;
  double precision = 0.0;
  double recall = 0.0;
  std::vector<DocumentCounts> per_document;
  bool operator==(const EvalReport&) const = default;
};

using SpansByDocument = std::map<std::string, std::vector<QuestionSpan>>;

/// Micro-averaged entity-level precision and recall. A zero denominator
/// yields 1 when the numerator side is also empty (nothing predicted and
/// nothing to find), 0 otherwise. Throws ContractViolation when the two
/// maps have different document keys.
EvalReport evaluate(const SpansByDocument& pred, const SpansByDocument& gold,
                    const MatchCriterion& criterion);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// One named row of the comparison table.
struct ModelScore {
  std::string model;
  EvalReport report;
};

/// Tab-separated table with columns S.No., Model, Precision, Recall;
/// metrics in percent.
std::string render_table(const std::vector<ModelScore>& rows);

}  // namespace qx
