#include "qx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "qx/error.hpp"

namespace qx {
namespace {

std::size_t overlap_words(const QuestionSpan& a, const QuestionSpan& b) noexcept {
  const std::size_t lo = std::max(a.start_word, b.start_word);
  const std::size_t hi = std::min(a.end_word, b.end_word);
  return lo <= hi ? hi - lo + 1 : 0;
}

double ratio(std::size_t num, std::size_t den, bool numerator_side_empty) {
  if (den > 0) return static_cast<double>(num) / static_cast<double>(den);
  return numerator_side_empty ? 1.0 : 0.0;
}

// 66.666.. -> "66.7", 100 -> "100"
std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
  std::string s = buf;
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

}  // namespace

MatchCriterion MatchCriterion::iou(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ContractViolation("iou threshold must be in (0, 1], got " +
                            std::to_string(threshold));
  }
  return {Kind::iou, threshold};
}

MatchCriterion MatchCriterion::parse(const std::string& s) {
  if (s == "exact") return exact_span();
  if (s == "text") return exact_text();
  if (s.rfind("iou:", 0) == 0) {
    const std::string num = s.substr(4);
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      throw ContractViolation("invalid iou threshold \"" + num + "\"");
    }
    return iou(t);
  }
  throw ContractViolation("unknown match criterion \"" + s +
                          "\" (expected exact, text or iou:<t>)");
}

std::string MatchCriterion::to_string() const {
  switch (kind) {
    case Kind::exact_span:
      return "exact";
    case Kind::exact_text_normalized:
      return "text";
    case Kind::iou: {
      std::ostringstream ss;
      ss << "iou:" << iou_threshold;
      return ss.str();
    }
  }
  return "text";
}

std::string normalize_question_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

double word_iou(const QuestionSpan& a, const QuestionSpan& b) noexcept {
  const std::size_t inter = overlap_words(a, b);
  const std::size_t uni = a.length() + b.length() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool spans_match(const QuestionSpan& pred, const QuestionSpan& gold,
                 const MatchCriterion& criterion) {
  switch (criterion.kind) {
    case MatchCriterion::Kind::exact_span:
      return pred.start_word == gold.start_word && pred.end_word == gold.end_word;
    case MatchCriterion::Kind::exact_text_normalized:
      return normalize_question_text(pred.text) == normalize_question_text(gold.text);
    case MatchCriterion::Kind::iou:
      return word_iou(pred, gold) >= criterion.iou_threshold;
  }
  return false;
}

std::vector<std::pair<std::size_t, std::size_t>> match_spans(
    const std::vector<QuestionSpan>& pred,
    const std::vector<QuestionSpan>& gold, const MatchCriterion& criterion) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> used(pred.size(), false);
  for (std::size_t g = 0; g < gold.size(); ++g) {
    std::optional<std::size_t> best;
    std::size_t best_overlap = 0;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (used[p] || !spans_match(pred[p], gold[g], criterion)) continue;
      const std::size_t ov = overlap_words(pred[p], gold[g]);
      if (!best || ov > best_overlap ||
          (ov == best_overlap && pred[p].start_word < pred[*best].start_word)) {
        best = p;
        best_overlap = ov;
      }
    }
    if (best) {
      used[*best] = true;
      pairs.emplace_back(*best, g);
    }
  }
  return pairs;
}

EvalReport evaluate(const SpansByDocument& pred, const SpansByDocument& gold,
                    const MatchCriterion& criterion) {
  EvalReport report;
  auto p = pred.begin();
  auto g = gold.begin();
  for (; p != pred.end() && g != gold.end(); ++p, ++g) {
    if (p->first != g->first) break;
    DocumentCounts doc;
    doc.id = g->first;
    doc.predicted = p->second.size();
    doc.gold = g->second.size();
    doc.true_positives = match_spans(p->second, g->second, criterion).size();
    report.true_positives += doc.true_positives;
    report.predicted_total += doc.predicted;
    report.gold_total += doc.gold;
    report.per_document.push_back(std::move(doc));
  }
  if (p != pred.end() || g != gold.end()) {
    const std::string& key = p != pred.end() ? p->first : g->first;
    throw ContractViolation("evaluate: document \"" + key +
                            "\" is not present on both the predicted and gold side");
  }
  report.precision = ratio(report.true_positives, report.predicted_total,
                           report.gold_total == 0);
  report.recall = ratio(report.true_positives, report.gold_total,
                        report.predicted_total == 0);
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : report.per_document) {
    docs.push_back({{"id", d.id},
                    {"true_positives", d.true_positives},
                    {"predicted", d.predicted},
                    {"gold", d.gold}});
  }
  return {{"true_positives", report.true_positives},
          {"predicted_total", report.predicted_total},
          {"gold_total", report.gold_total},
          {"precision", report.precision},
          {"recall", report.recall},
          {"per_document", std::move(docs)}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  j.at("true_positives").get_to(r.true_positives);
  j.at("predicted_total").get_to(r.predicted_total);
  j.at("gold_total").get_to(r.gold_total);
  j.at("precision").get_to(r.precision);
  j.at("recall").get_to(r.recall);
  for (const auto& d : j.at("per_document")) {
    r.per_document.push_back({d.at("id").get<std::string>(),
                              d.at("true_positives").get<std::size_t>(),
                              d.at("predicted").get<std::size_t>(),
                              d.at("gold").get<std::size_t>()});
  }
  return r;
}

std::string render_table(const std::vector<ModelScore>& rows) {
  std::ostringstream out;
  out << "S.No.\tModel\tPrecision\tRecall\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i + 1 << '\t' << rows[i].model << '\t'
        << percent(rows[i].report.precision) << '\t'
        << percent(rows[i].report.recall) << '\n';
  }
  return out.str();
}

}  // namespace qx
