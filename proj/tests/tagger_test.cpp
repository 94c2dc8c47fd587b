#include <doctest.h>

#include <random>

#include "qx/error.hpp"
#include "qx/io.hpp"
#include "qx/tagger.hpp"
#include "test_util.hpp"

using namespace qx;
using enum BioTag;

namespace {

TagSequence sub(std::vector<BioTag> t) { return {std::move(t), TagLevel::subtoken}; }

std::vector<std::string> texts(const std::vector<QuestionSpan>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) out.push_back(s.text);
  return out;
}

}  // namespace

TEST_CASE("chunk_windows") {
  CHECK(chunk_windows(12, 8, 4) == std::vector<SubtokenRange>{{0, 8}, {4, 12}});
  CHECK(chunk_windows(5, 8, 4) == std::vector<SubtokenRange>{{0, 5}});
  CHECK(chunk_windows(8, 8, 4) == std::vector<SubtokenRange>{{0, 8}});
  CHECK(chunk_windows(0, 8, 4).empty());
  CHECK(chunk_windows(10, 4, 1) == std::vector<SubtokenRange>{{0, 4}, {3, 7}, {6, 10}});
  CHECK(chunk_windows(11, 4, 1) ==
        std::vector<SubtokenRange>{{0, 4}, {3, 7}, {6, 10}, {9, 11}});
  CHECK_THROWS_AS(chunk_windows(10, 4, 4), ContractViolation);
  CHECK_THROWS_AS(chunk_windows(10, 4, 0), ContractViolation);

  std::vector<Token> toks(12);
  for (std::size_t i = 0; i < toks.size(); ++i) toks[i].text = std::to_string(i);
  const auto chunks = chunk_long_input(toks, 8, 4);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[1].front().text == "4");
  CHECK(chunks[1].back().text == "11");
}

TEST_CASE("merge_windows takes the window where a position is most central") {
  const std::vector<SubtokenRange> windows = {{0, 8}, {4, 12}};
  // Window 0 says B everywhere, window 1 says I everywhere.
  const auto merged = merge_windows(
      windows, {sub(std::vector<BioTag>(8, B)), sub(std::vector<BioTag>(8, I))}, 12);
  // Distances for p in 4..7: w0 = min(p, 8-p), w1 = min(p-4, 12-p).
  // p=4: 4 vs 0; p=5: 3 vs 1; p=6: 2 vs 2 (tie, earlier window); p=7: 1 vs 3.
  CHECK(merged == sub({B, B, B, B, B, B, B, I, I, I, I, I}));
  CHECK(merged.tags[6] == B);

  CHECK_THROWS_AS(merge_windows(windows, {sub({B})}, 12), ContractViolation);
  CHECK_THROWS_AS(merge_windows({{0, 4}}, {sub({O, O, O, O})}, 6), ContractViolation);
}

TEST_CASE("merging consistent windows is the identity") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> n_dist(1, 60), len_dist(2, 16);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = n_dist(rng);
    const std::size_t max_len = len_dist(rng);
    const std::size_t stride = std::uniform_int_distribution<std::size_t>(1, max_len - 1)(rng);
    auto global = testing::random_tags(rng, n);
    global.level = TagLevel::subtoken;
    const auto windows = chunk_windows(n, max_len, stride);
    CHECK(windows.front().begin == 0);
    CHECK(windows.back().end == n);
    std::vector<TagSequence> parts;
    for (const auto& w : windows) {
      CHECK(w.size() <= max_len);
      parts.push_back(sub({global.tags.begin() + w.begin, global.tags.begin() + w.end}));
    }
    for (std::size_t k = 1; k < windows.size(); ++k) {
      CHECK(windows[k].begin == windows[k - 1].begin + (max_len - stride));
    }
    CHECK(merge_windows(windows, parts, n) == global);
  }
}

TEST_CASE("oracle tagger") {
  OracleTagger oracle;
  oracle.table.emplace("doc", TagSequence{{O, O, O, B, I, I}, TagLevel::word});
  const Document doc{"doc", "Answer the following. What is force?"};
  const auto spans = extract(oracle, doc, RepairPolicy::strict);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == QuestionSpan{3, 5, "What is force?"});

  CHECK_THROWS_AS(extract(oracle, {"missing", "a b"}, RepairPolicy::strict), ContractViolation);
  CHECK_THROWS_AS(extract(oracle, {"doc", "too few words"}, RepairPolicy::strict),
                  ContractViolation);
  CHECK(extract(oracle, {"missing", "  "}, RepairPolicy::strict).empty());

  SUBCASE("policy decides what happens to an orphan I") {
    OracleTagger bad;
    bad.table.emplace("x", TagSequence{{O, I, I}, TagLevel::word});
    CHECK_THROWS_AS(extract(bad, {"x", "a b c"}, RepairPolicy::strict), MalformedTags);
    CHECK(texts(extract(bad, {"x", "a b c"}, RepairPolicy::iob2_repair)) ==
          std::vector<std::string>{"b c"});
  }
}

TEST_CASE("extract with an oracle reproduces the tags it was given") {
  // For any text and any well-formed tag sequence, the pipeline returns
  // exactly decode(tags) with text sliced from the source.
  std::mt19937_64 rng(77);
  const std::vector<std::string> words = {"What", "is", "force?", "Q.No.", "5", "(a)", "x\ny"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), n_dist(0, 30);
  for (int i = 0; i < 300; ++i) {
    std::string text;
    const std::size_t n = n_dist(rng);
    for (std::size_t k = 0; k < n; ++k) text += (k ? (k % 5 ? " " : "\t ") : "") + words[pick(rng)];
    const auto toks = word_tokenize(text);
    const auto spans = testing::random_spans(rng, toks.size());
    OracleTagger oracle;
    oracle.table.emplace("d", encode_tags(spans, toks.size()));
    auto expect = spans;
    attach_text(expect, text, toks);
    CHECK(extract(oracle, {"d", text}, RepairPolicy::strict) == expect);
    CHECK(extract_many(oracle, {{"d", text}, {"d", text}}, RepairPolicy::strict) ==
          std::vector<std::vector<QuestionSpan>>{expect, expect});
  }
}

TEST_CASE("rule tagger") {
  const Tagger t = RuleTagger{RuleSet::builtin_default()};
  const Document doc{"d", "Q.No. 1 What is force? Explain briefly."};
  CHECK(texts(extract(t, doc, RepairPolicy::strict)) ==
        std::vector<std::string>{"Q.No. 1 What is force?"});
  const auto tags = tag(t, doc, word_tokenize(doc.text));
  CHECK(tags == TagSequence{{B, I, I, I, I, O, O}, TagLevel::word});
}

TEST_CASE("exam row 1 through the OCR pipeline") {
  const auto linear = ocr_to_text(load_ocr_json(testing::test_data("row1_ocr.json")));
  const auto gold = read_dataset(testing::test_data("row1.gold.jsonl"), DatasetFormat::jsonl);
  REQUIRE(gold.size() == 1);
  CHECK(linear.text == gold[0].text);

  const Tagger oracle = OracleTagger{testing::load_oracle_tags(testing::test_data("row1.oracle.jsonl"))};
  const auto spans = extract(oracle, {"row1_ocr", linear.text}, RepairPolicy::strict);
  REQUIRE(spans.size() == 4);
  CHECK(spans == gold[0].spans);
  CHECK(spans[0].text.rfind("2.928g", 0) == 0);
  CHECK(spans[3].text == "A body is projected at an angled 45° with a velocity of\n"
                         "9.8m/s². What will be its horizontal range?");
}

TEST_CASE("remote tagger parameters are validated before any request") {
  RemoteTagger r;
  r.endpoint = "http://127.0.0.1:9";
  CHECK_THROWS_AS(r.validate(), ContractViolation);  // no vocabulary
  r.vocab = std::make_shared<Vocabulary>(std::vector<std::string>{"[UNK]"});
  CHECK_NOTHROW(r.validate());
  r.stride = r.max_len;
  CHECK_THROWS_AS(r.validate(), ContractViolation);
  r.stride = 4;
  r.timeout = std::chrono::milliseconds(0);
  CHECK_THROWS_AS(extract(r, {"d", "a"}, RepairPolicy::strict), ContractViolation);
}
