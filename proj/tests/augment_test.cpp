#include <doctest.h>

#include <algorithm>
#include <random>

#include "qx/augment.hpp"
#include "qx/error.hpp"
#include "qx/io.hpp"
#include "qx/labels.hpp"
#include "qx/tokenize.hpp"
#include "test_util.hpp"

using namespace qx;

namespace {

AnnotatedExample example(std::string id, std::string text,
                         std::vector<std::pair<std::size_t, std::size_t>> spans) {
  AnnotatedExample ex{std::move(id), std::move(text), {}, ExampleSource::manual};
  const auto words = word_tokenize(ex.text);
  for (auto [a, b] : spans) ex.spans.push_back({a, b, span_text(ex.text, words, a, b)});
  return ex;
}

AugmentConfig no_op(std::size_t count) {
  AugmentConfig cfg;
  cfg.target_count = count;
  cfg.p_prepend_noise = cfg.p_append_noise = cfg.p_insert_question = 0.0;
  return cfg;
}

std::vector<AnnotatedExample> small_base() {
  return {example("a", "Q.No. 1 What is force? [2 marks]", {{2, 4}}),
          example("b", "Answer briefly. Define refraction of light. State Ohm's law.",
                  {{2, 5}, {6, 8}}),
          example("c", "Rough work only", {}),
          example("d", "How far does light travel in 1 s?\nOR\nWhat is a lens?",
                  {{0, 7}, {9, 11}})};
}

}  // namespace

TEST_CASE("noise prepend reproduces the worked example") {
  const std::vector<AnnotatedExample> base = {example("q", "What is force?", {{0, 2}})};
  AugmentConfig cfg = no_op(1);
  cfg.p_prepend_noise = 1.0;
  const auto out = augment(base, NoisePool({"Answer the following."}), cfg);
  REQUIRE(out.size() == 1);
  CHECK(out[0].text == "Answer the following. What is force?");
  REQUIRE(out[0].spans.size() == 1);
  CHECK(out[0].spans[0].start_word == 3);
  CHECK(out[0].spans[0].end_word == 5);
  CHECK(out[0].source == ExampleSource::augmented);
  using enum BioTag;
  CHECK(encode_tags(out[0].spans, 6).tags == std::vector<BioTag>{O, O, O, B, I, I});
}

TEST_CASE("zero probabilities give a permutation of the base") {
  const auto base = small_base();
  const auto out = augment(base, NoisePool{}, no_op(base.size()));
  REQUIRE(out.size() == base.size());
  std::vector<std::string> in_texts, out_texts;
  for (const auto& e : base) in_texts.push_back(e.text);
  for (const auto& e : out) {
    out_texts.push_back(e.text);
    auto it = std::find_if(base.begin(), base.end(),
                           [&](const AnnotatedExample& b) { return b.text == e.text; });
    REQUIRE(it != base.end());
    CHECK(it->spans == e.spans);
  }
  std::sort(in_texts.begin(), in_texts.end());
  std::sort(out_texts.begin(), out_texts.end());
  CHECK(in_texts == out_texts);
}

TEST_CASE("noise is normalized and kept out of gold spans") {
  CHECK(normalize_noise("  Study the graph below ") == "Study the graph below.");
  CHECK(normalize_noise("Section-II:") == "Section-II:");
  CHECK(normalize_noise("   ").empty());

  const auto base = small_base();
  const std::vector<std::string> snippets = {"Periodic Test 2", "Blank page", "Worksheet 7"};
  AugmentConfig cfg = no_op(200);
  cfg.p_prepend_noise = 1.0;
  cfg.p_append_noise = 1.0;
  const auto out = augment(base, NoisePool(snippets), cfg);
  for (const auto& ex : out) {
    const auto words = word_tokenize(ex.text);
    // The first noise snippet occupies the first words; the last one the
    // last words. Gold spans never touch either region.
    std::size_t head = 0, tail = 0;
    for (const auto& s : snippets) {
      const auto n = normalize_noise(s);
      const auto k = word_tokenize(n).size();
      if (ex.text.rfind(n + " ", 0) == 0) head = k;
      if (ex.text.size() >= n.size() &&
          ex.text.compare(ex.text.size() - n.size(), n.size(), n) == 0) {
        tail = k;
      }
    }
    REQUIRE(head > 0);
    REQUIRE(tail > 0);
    for (const auto& s : ex.spans) {
      CHECK(s.start_word >= head);
      CHECK(s.end_word < words.size() - tail);
    }
  }
}

TEST_CASE("inserted questions come from other examples") {
  const auto base = small_base();
  AugmentConfig cfg = no_op(400);
  cfg.p_insert_question = 1.0;
  cfg.max_inserted_questions = 3;
  const auto out = augment(base, NoisePool{}, cfg);
  std::size_t grew = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& ex = out[i];
    CHECK(validate_example(ex).empty());
    CHECK(verify_augmented(ex, base));
    const auto stem = ex.id.substr(0, ex.id.find('#'));
    auto it = std::find_if(base.begin(), base.end(),
                           [&](const AnnotatedExample& b) { return b.id == stem; });
    REQUIRE(it != base.end());
    CHECK(ex.spans.size() > it->spans.size());
    CHECK(ex.spans.size() <= it->spans.size() + 3);
    if (ex.spans.size() > it->spans.size()) ++grew;
    // Original questions survive intact and in order.
    std::size_t k = 0;
    for (const auto& s : ex.spans) {
      if (k < it->spans.size() && s.text == it->spans[k].text) ++k;
    }
    CHECK(k == it->spans.size());
  }
  CHECK(grew == out.size());
}

TEST_CASE("augment properties over random seeds") {
  const auto base = read_dataset(testing::bundled_data("synthetic_base.jsonl"), DatasetFormat::jsonl);
  const auto noise = NoisePool::load(testing::bundled_data("noise.txt"));
  std::mt19937_64 seeds(2024);
  for (int round = 0; round < 10; ++round) {
    AugmentConfig cfg;
    cfg.target_count = 700;
    cfg.seed = seeds();
    const auto out = augment(base, noise, cfg);
    CHECK(out.size() == cfg.target_count);
    for (const auto& ex : out) {
      CHECK(validate_example(ex).empty());
      CHECK(verify_augmented(ex, base));
      CHECK(ex.source == ExampleSource::augmented);
    }
    CHECK(augment(base, noise, cfg) == out);
  }
}

TEST_CASE("different seeds give different corpora") {
  const auto base = small_base();
  AugmentConfig cfg;
  cfg.target_count = 50;
  const NoisePool noise({"Blank page", "Unit test"});
  const auto a = augment(base, noise, cfg);
  cfg.seed += 1;
  CHECK(augment(base, noise, cfg) != a);
}

TEST_CASE("augment errors") {
  const auto base = small_base();
  AugmentConfig cfg;
  cfg.target_count = 10;
  CHECK_THROWS_AS(augment({}, NoisePool({"x"}), cfg), ContractViolation);
  CHECK_THROWS_AS(augment(base, NoisePool{}, cfg), ContractViolation);
  cfg.p_append_noise = 1.5;
  CHECK_THROWS_AS(augment(base, NoisePool({"x"}), cfg), ContractViolation);
  CHECK_THROWS_AS(augment(base, NoisePool{}, no_op(0)), ContractViolation);

  SUBCASE("a noise snippet equal to a gold question is rejected") {
    AugmentConfig ok;
    ok.target_count = 5;
    CHECK_THROWS_AS(augment(base, NoisePool({"what is   force?"}), ok), ContractViolation);
    CHECK_THROWS_AS(augment(base, NoisePool({"Define refraction of light"}), ok),
                    ContractViolation);
  }
  SUBCASE("invalid base example") {
    auto bad = base;
    bad[0].spans[0].text = "tampered";
    CHECK_THROWS_AS(augment(bad, NoisePool{}, no_op(4)), ContractViolation);
  }
}

TEST_CASE("verify_augmented") {
  const auto base = small_base();
  CHECK(verify_augmented(base[1], base));
  auto edited = base[1];
  edited.spans[0].text = "Define reflection of light.";
  CHECK_FALSE(verify_augmented(edited, base));
  CHECK(verify_augmented(base[2], base));  // no spans
}
