#include "qx/augment.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>

#include "qx/error.hpp"
#include "qx/eval.hpp"
#include "qx/io.hpp"
#include "qx/labels.hpp"
#include "qx/tokenize.hpp"

namespace qx {
namespace {

bool is_terminal_punct(char c) noexcept {
  return c == '.' || c == '?' || c == '!' || c == ':' || c == ';';
}

struct Segment {
  std::string text;
  std::size_t word_count = 0;
  std::vector<QuestionSpan> spans;  // word indices local to the segment
};

// A question copied from another example, to be placed before base word
// `gap` (gap == word count means at the end).
struct Insertion {
  std::size_t gap;
  std::string text;
};

class Builder {
 public:
  Builder(const std::vector<AnnotatedExample>& base, const NoisePool& noise,
          const AugmentConfig& cfg)
      : base_(base), noise_(noise), cfg_(cfg), rng_(cfg.seed) {
    base_words_.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      base_words_.push_back(word_tokenize(base[i].text));
      if (!base[i].spans.empty()) with_questions_.push_back(i);
    }
  }

  std::vector<AnnotatedExample> run() {
    std::vector<AnnotatedExample> out;
    out.reserve(cfg_.target_count);
    std::vector<std::size_t> order(base_.size());
    std::size_t cursor = order.size();
    for (std::size_t i = 0; i < cfg_.target_count; ++i) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng_);
        cursor = 0;
      }
      out.push_back(make_one(order[cursor++], i));
    }
    return out;
  }

 private:
  bool coin(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::bernoulli_distribution(p)(rng_);
  }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  std::string draw_noise() {
    return normalize_noise(noise_.snippets()[pick(noise_.snippets().size())]);
  }

  std::vector<Insertion> draw_insertions(std::size_t self) {
    std::vector<Insertion> out;
    if (cfg_.max_inserted_questions == 0) return out;
    // Donors are other examples that have at least one question.
    const std::size_t donors =
        with_questions_.size() -
        (std::binary_search(with_questions_.begin(), with_questions_.end(), self)
             ? 1
             : 0);
    if (donors == 0 || !coin(cfg_.p_insert_question)) return out;

    const auto& ex = base_[self];
    std::vector<std::size_t> gaps;  // gaps not strictly inside a span
    const std::size_t n = base_words_[self].size();
    for (std::size_t g = 0, s = 0; g <= n; ++g) {
      while (s < ex.spans.size() && ex.spans[s].end_word < g) ++s;
      if (s < ex.spans.size() && ex.spans[s].start_word < g &&
          g <= ex.spans[s].end_word) {
        continue;
      }
      gaps.push_back(g);
    }

    const std::size_t k = std::uniform_int_distribution<std::size_t>(
        1, cfg_.max_inserted_questions)(rng_);
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t donor = with_questions_[pick(with_questions_.size())];
      while (donor == self) donor = with_questions_[pick(with_questions_.size())];
      const auto& spans = base_[donor].spans;
      const auto& span = spans[pick(spans.size())];
      out.push_back({gaps[pick(gaps.size())], span.text});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Insertion& a, const Insertion& b) {
                       return a.gap < b.gap;
                     });
    return out;
  }

  Segment base_chunk(std::size_t self, std::size_t from, std::size_t to) const {
    const auto& ex = base_[self];
    const auto& words = base_words_[self];
    Segment seg;
    if (from >= to) return seg;
    seg.text = ex.text.substr(words[from].char_start,
                              words[to - 1].char_end - words[from].char_start);
    seg.word_count = to - from;
    for (const auto& s : ex.spans) {
      if (s.start_word >= from && s.end_word < to) {
        seg.spans.push_back({s.start_word - from, s.end_word - from, {}});
      }
    }
    return seg;
  }

  static Segment text_segment(std::string text, bool is_question) {
    Segment seg;
    seg.word_count = word_tokenize(text).size();
    if (is_question && seg.word_count > 0) {
      seg.spans.push_back({0, seg.word_count - 1, {}});
    }
    seg.text = std::move(text);
    return seg;
  }

  AnnotatedExample make_one(std::size_t self, std::size_t serial) {
    const auto& ex = base_[self];

    std::optional<std::string> prefix;
    std::optional<std::string> suffix;
    if (coin(cfg_.p_prepend_noise)) prefix = draw_noise();
    if (coin(cfg_.p_append_noise)) suffix = draw_noise();
    const auto insertions = draw_insertions(self);

    AnnotatedExample out;
    out.id = ex.id + "#aug" + std::to_string(serial);
    out.source = ExampleSource::augmented;
    if (!prefix && !suffix && insertions.empty()) {
      out.text = ex.text;
      out.spans = ex.spans;
      return out;
    }

    std::vector<Segment> segments;
    if (prefix) segments.push_back(text_segment(*prefix, false));
    std::size_t from = 0;
    for (const auto& ins : insertions) {
      segments.push_back(base_chunk(self, from, ins.gap));
      segments.push_back(text_segment(ins.text, true));
      from = ins.gap;
    }
    segments.push_back(base_chunk(self, from, base_words_[self].size()));
    if (suffix) segments.push_back(text_segment(*suffix, false));

    std::size_t offset = 0;
    for (const auto& seg : segments) {
      if (seg.word_count == 0) continue;
      if (!out.text.empty()) out.text += ' ';
      out.text += seg.text;
      for (const auto& s : seg.spans) {
        out.spans.push_back({s.start_word + offset, s.end_word + offset, {}});
      }
      offset += seg.word_count;
    }
    attach_text(out.spans, out.text, word_tokenize(out.text));
    return out;
  }

  const std::vector<AnnotatedExample>& base_;
  const NoisePool& noise_;
  const AugmentConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::vector<Token>> base_words_;
  std::vector<std::size_t> with_questions_;
};

}  // namespace

void AugmentConfig::validate() const {
  if (target_count == 0) throw ContractViolation("target_count must be > 0");
  for (double p : {p_prepend_noise, p_append_noise, p_insert_question}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ContractViolation("augmentation probability " + std::to_string(p) +
                              " outside [0, 1]");
    }
  }
}

NoisePool::NoisePool(std::vector<std::string> snippets) {
  for (auto& s : snippets) {
    if (!word_tokenize(s).empty()) snippets_.push_back(std::move(s));
  }
}

NoisePool NoisePool::load(const std::filesystem::path& path) {
  return NoisePool(read_lines(path));
}

void NoisePool::check_against(const std::vector<AnnotatedExample>& base) const {
  std::unordered_set<std::string> questions;
  for (const auto& ex : base) {
    for (const auto& s : ex.spans) questions.insert(normalize_question_text(s.text));
  }
  for (const auto& snippet : snippets_) {
    if (questions.count(normalize_question_text(snippet)) ||
        questions.count(normalize_question_text(normalize_noise(snippet)))) {
      throw ContractViolation("noise snippet \"" + snippet +
                              "\" is a gold question");
    }
  }
}

std::string normalize_noise(std::string_view snippet) {
  const auto words = word_tokenize(snippet);
  if (words.empty()) return {};
  std::string out(snippet.substr(words.front().char_start,
                                 words.back().char_end - words.front().char_start));
  if (!is_terminal_punct(out.back())) out += '.';
  return out;
}

std::vector<AnnotatedExample> augment(const std::vector<AnnotatedExample>& base,
                                      const NoisePool& noise,
                                      const AugmentConfig& cfg) {
  cfg.validate();
  if (base.empty()) throw ContractViolation("augment: empty base set");
  if (cfg.needs_noise() && noise.empty()) {
    throw ContractViolation(
        "augment: noise probabilities are non-zero but the noise pool is empty");
  }
  for (const auto& ex : base) {
    const auto problems = validate_example(ex);
    if (!problems.empty()) {
      throw ContractViolation("augment: base example \"" + ex.id +
                              "\" is invalid: " + problems.front());
    }
  }
  noise.check_against(base);
  return Builder(base, noise, cfg).run();
}

bool verify_augmented(const AnnotatedExample& example,
                      const std::vector<AnnotatedExample>& base) {
  std::unordered_set<std::string_view> known;
  for (const auto& ex : base) {
    for (const auto& s : ex.spans) known.insert(s.text);
  }
  return std::all_of(example.spans.begin(), example.spans.end(),
                     [&](const QuestionSpan& s) { return known.count(s.text) > 0; });
}

}  // namespace qx
