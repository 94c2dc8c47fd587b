#include "qx/rules.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <boost/regex.hpp>

#include "qx/error.hpp"
#include "qx/labels.hpp"
#include "qx/tokenize.hpp"

namespace qx {

struct RuleSet::Compiled {
  std::vector<boost::regex> starts;
  std::vector<boost::regex> ends;
};

namespace {

constexpr auto kSyntax = boost::regex::perl;

boost::regex compile(const std::string& pattern, std::size_t line,
                     std::size_t column) {
  try {
    return boost::regex(pattern, kSyntax);
  } catch (const boost::regex_error& e) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ", " : "";
    throw ParseError(line, where + "column " +
                               std::to_string(column + e.position()) +
                               ": invalid pattern \"" + pattern +
                               "\": " + e.what());
  }
}

std::string_view trim_left(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  return s;
}

std::string_view trim(std::string_view s) {
  s = trim_left(s);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Match {
  std::size_t begin;
  std::size_t end;
  std::size_t pattern;
};

std::vector<Match> find_all(std::string_view text,
                            const std::vector<boost::regex>& patterns) {
  std::vector<Match> out;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    boost::cregex_iterator it(text.data(), text.data() + text.size(),
                              patterns[p]);
    for (boost::cregex_iterator last; it != last; ++it) {
      const auto& m = *it;
      const auto begin = static_cast<std::size_t>(m.position());
      out.push_back({begin, begin + static_cast<std::size_t>(m.length()), p});
    }
  }
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.pattern < b.pattern;
  });
  return out;
}

// First word that ends after `offset`: the word holding it, or the next word
// when `offset` is in whitespace.
std::optional<std::size_t> word_at_or_after(const std::vector<Token>& words,
                                            std::size_t offset) {
  auto it = std::upper_bound(
      words.begin(), words.end(), offset,
      [](std::size_t off, const Token& w) { return off < w.char_end; });
  if (it == words.end()) return std::nullopt;
  return static_cast<std::size_t>(it - words.begin());
}

// Last word that starts before `end_offset` (exclusive end of a match).
std::optional<std::size_t> word_before(const std::vector<Token>& words,
                                       std::size_t end_offset) {
  auto it = std::lower_bound(
      words.begin(), words.end(), end_offset,
      [](const Token& w, std::size_t off) { return w.char_start < off; });
  if (it == words.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - words.begin()) - 1;
}

}  // namespace

std::string_view to_string(RuleMode mode) noexcept {
  return mode == RuleMode::start_to_next_start ? "start_to_next_start"
                                               : "start_to_end_match";
}

RuleSet::RuleSet(std::vector<std::string> start_patterns,
                 std::vector<std::string> end_patterns, RuleMode mode)
    : start_patterns_(std::move(start_patterns)),
      end_patterns_(std::move(end_patterns)),
      mode_(mode) {
  if (start_patterns_.empty()) throw ParseError(0, "no start patterns");
  auto compiled = std::make_shared<Compiled>();
  for (const auto& p : start_patterns_) compiled->starts.push_back(compile(p, 0, 1));
  for (const auto& p : end_patterns_) compiled->ends.push_back(compile(p, 0, 1));
  compiled_ = std::move(compiled);
}

RuleSet RuleSet::parse(std::string_view content) {
  std::vector<std::string> starts;
  std::vector<std::string> ends;
  std::optional<RuleMode> mode;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view raw = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    const std::string_view line = trim_left(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "line " + std::to_string(line_no) +
                                    ": expected \"<key>: <value>\"");
    }
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim_left(line.substr(colon + 1));
    const std::size_t column = static_cast<std::size_t>(value.data() - raw.data()) + 1;

    if (key == "start" || key == "end") {
      if (value.empty()) {
        throw ParseError(line_no, "line " + std::to_string(line_no) +
                                      ": empty " + std::string(key) +
                                      " pattern");
      }
      std::string pattern(value);
      compile(pattern, line_no, column);
      (key == "start" ? starts : ends).push_back(std::move(pattern));
    } else if (key == "mode") {
      if (mode) {
        throw ParseError(line_no, "line " + std::to_string(line_no) +
                                      ": duplicate mode");
      }
      const auto v = trim(value);
      if (v == "start_to_next_start") {
        mode = RuleMode::start_to_next_start;
      } else if (v == "start_to_end_match") {
        mode = RuleMode::start_to_end_match;
      } else {
        throw ParseError(line_no, "line " + std::to_string(line_no) +
                                      ": unknown mode \"" + std::string(v) +
                                      "\"");
      }
    } else {
      throw ParseError(line_no, "line " + std::to_string(line_no) +
                                    ": unknown key \"" + std::string(key) +
                                    "\"");
    }
    if (nl == content.size()) break;
  }
  if (starts.empty()) throw ParseError(0, "no start patterns");
  return RuleSet(std::move(starts), std::move(ends),
                 mode.value_or(RuleMode::start_to_next_start));
}

RuleSet RuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ruleset file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string_view RuleSet::builtin_default_text() noexcept {
  static constexpr std::string_view text =
#include "default_rules.inc"
      ;
  return text;
}

const RuleSet& RuleSet::builtin_default() {
  static const RuleSet rules = parse(builtin_default_text());
  return rules;
}

std::vector<QuestionSpan> rule_extract(std::string_view text,
                                       const RuleSet& rules) {
  const auto words = word_tokenize(text);
  if (words.empty()) return {};

  // Start matches snapped to words; on ties the earlier match (and, at equal
  // offsets, the earlier pattern) claims the word.
  struct Start {
    std::size_t word;
    std::size_t match_end;
  };
  std::vector<Start> starts;
  for (const auto& m : find_all(text, rules.compiled().starts)) {
    auto w = word_at_or_after(words, m.begin);
    if (!w) continue;
    if (!starts.empty() && starts.back().word >= *w) continue;
    starts.push_back({*w, m.end});
  }
  if (starts.empty()) return {};

  std::vector<Match> ends;
  if (rules.mode() == RuleMode::start_to_end_match) {
    ends = find_all(text, rules.compiled().ends);
  }

  std::vector<QuestionSpan> spans;
  spans.reserve(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::size_t first = starts[k].word;
    const std::size_t limit =
        k + 1 < starts.size() ? starts[k + 1].word - 1 : words.size() - 1;
    std::size_t last = limit;
    if (rules.mode() == RuleMode::start_to_end_match) {
      auto it = std::lower_bound(
          ends.begin(), ends.end(), starts[k].match_end,
          [](const Match& m, std::size_t off) { return m.begin < off; });
      if (it != ends.end()) {
        auto w = word_before(words, std::max(it->end, it->begin + 1));
        if (w && *w >= first && *w <= limit) last = *w;
      }
    }
    spans.push_back({first, last, span_text(text, words, first, last)});
  }
  return spans;
}

}  // namespace qx
