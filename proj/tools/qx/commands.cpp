#include "qx/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "qx/augment.hpp"
#include "qx/error.hpp"
#include "qx/eval.hpp"
#include "qx/io.hpp"
#include "qx/labels.hpp"
#include "qx/output_file.hpp"
#include "qx/tagger.hpp"

namespace qx::cli {
namespace {

namespace fs = std::filesystem;

// Documents are tagged in batches so memory stays flat in corpus size while
// remote taggers still get enough work to fill --parallel slots.
constexpr std::size_t kBatch = 64;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

bool is_jsonl(const std::string& path) { return fs::path(path).extension() == ".jsonl"; }

/// Streams (id, text, source) from --input: a .jsonl dataset, or plain text
/// with one document per non-blank line (id "line-<n>").
void for_each_document(const std::string& path,
                       const std::function<void(AnnotatedExample)>& sink) {
  auto in = open_input(path);
  if (is_jsonl(path)) {
    try {
      read_jsonl(in, sink);
    } catch (const ParseError& e) {
      throw ParseError(e.line(), path + ": " + e.what());
    }
    return;
  }
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t\n\r\f\v") == std::string::npos) continue;
    sink(AnnotatedExample{"line-" + std::to_string(n), line, {}, ExampleSource::manual});
  }
}

RepairPolicy parse_policy(const std::string& s) {
  if (s == "strict") return RepairPolicy::strict;
  if (s == "repair") return RepairPolicy::iob2_repair;
  throw UsageError("--policy must be strict or repair, got \"" + s + "\"");
}

DatasetFormat parse_format(const std::string& flag, const std::string& s) {
  try {
    return parse_dataset_format(s);
  } catch (const ContractViolation&) {
    throw UsageError(flag + " must be jsonl or conll, got \"" + s + "\"");
  }
}

std::shared_ptr<const Vocabulary> load_vocab(const std::string& path, bool lowercase = false) {
  Vocabulary::Options opts;
  opts.lowercase = lowercase;
  return std::make_shared<const Vocabulary>(Vocabulary::load(path, opts));
}

/// Oracle file: JSONL with either {"id","tags":[...]} (word-level tag
/// strings) or a full dataset record whose spans are encoded to tags.
OracleTagger load_oracle(const std::string& path) {
  OracleTagger oracle;
  auto in = open_input(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    const std::string at = path + ":" + std::to_string(n) + ": ";
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw ParseError(n, at + "expected an object with a string \"id\"");
    }
    const auto id = j["id"].get<std::string>();
    TagSequence seq{{}, TagLevel::word};
    if (j.contains("tags")) {
      if (!j["tags"].is_array()) throw ParseError(n, at + "\"tags\" must be an array");
      for (const auto& t : j["tags"]) {
        if (!t.is_string()) throw ParseError(n, at + "tags must be strings");
        try {
          seq.tags.push_back(bio_tag_from_string(t.get<std::string>()));
        } catch (const ParseError& e) {
          throw ParseError(n, at + e.what());
        }
      }
    } else {
      const auto ex = example_from_jsonl(j, n);
      seq = encode_tags(ex.spans, word_tokenize(ex.text).size());
    }
    if (!oracle.table.emplace(id, std::move(seq)).second) {
      throw ParseError(n, at + "duplicate id \"" + id + "\"");
    }
  }
  return oracle;
}

Tagger make_tagger(const ExtractOptions& opt) {
  const auto colon = opt.tagger.find(':');
  const std::string kind = opt.tagger.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : opt.tagger.substr(colon + 1);
  if (colon == std::string::npos || arg.empty()) {
    throw UsageError("--tagger must be rule:<ruleset|default>, remote:<url> or oracle:<file>");
  }
  if (kind == "rule") {
    return RuleTagger{arg == "default" ? RuleSet::builtin_default() : RuleSet::load(arg)};
  }
  if (kind == "oracle") return load_oracle(arg);
  if (kind == "remote") {
    if (opt.vocab.empty()) throw UsageError("remote tagger needs --vocab (or QX_VOCAB)");
    if (opt.parallel == 0) throw UsageError("--parallel must be at least 1");
    if (opt.timeout_ms <= 0) throw UsageError("--timeout-ms must be positive");
    if (opt.stride == 0 || opt.stride >= opt.max_len) {
      throw UsageError("chunking needs 0 < --stride < --max-len");
    }
    RemoteTagger r;
    r.endpoint = arg;
    r.timeout = std::chrono::milliseconds(opt.timeout_ms);
    r.max_len = opt.max_len;
    r.stride = opt.stride;
    r.max_in_flight = opt.parallel;
    r.vocab = load_vocab(opt.vocab);
    return r;
  }
  throw UsageError("unknown tagger kind \"" + kind + "\"");
}

}  // namespace

void run_extract(const ExtractOptions& opt) {
  if (opt.input.empty() == opt.ocr.empty()) {
    throw UsageError("extract needs exactly one of --input or --ocr");
  }
  const RepairPolicy policy = parse_policy(opt.policy);
  const Tagger tagger = make_tagger(opt);

  OutputFile out(opt.out);
  std::vector<AnnotatedExample> batch;
  auto flush = [&] {
    if (batch.empty()) return;
    std::vector<Document> docs;
    docs.reserve(batch.size());
    for (const auto& ex : batch) docs.push_back({ex.id, ex.text});
    auto spans = extract_many(tagger, docs, policy);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch[i].spans = std::move(spans[i]);
      write_example(out.stream(), batch[i], DatasetFormat::jsonl);
    }
    batch.clear();
  };

  if (!opt.ocr.empty()) {
    const auto linear = ocr_to_text(load_ocr_json(opt.ocr));
    batch.push_back({fs::path(opt.ocr).stem().string(), linear.text, {}, ExampleSource::ocr});
  } else {
    for_each_document(opt.input, [&](AnnotatedExample ex) {
      ex.spans.clear();
      batch.push_back(std::move(ex));
      if (batch.size() == kBatch) flush();
    });
  }
  flush();
  out.commit();
}

void run_augment(const AugmentOptions& opt) {
  AugmentConfig cfg;
  cfg.target_count = opt.count;
  cfg.seed = opt.seed;
  cfg.p_prepend_noise = opt.p_prepend;
  cfg.p_append_noise = opt.p_append;
  cfg.p_insert_question = opt.p_insert;
  cfg.max_inserted_questions = opt.max_insert;
  const DatasetFormat format = parse_format("--format", opt.format);
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  if (opt.noise.empty() && cfg.needs_noise()) {
    throw UsageError("--noise is required unless both noise probabilities are 0");
  }

  const auto base = read_dataset(opt.base, DatasetFormat::jsonl);
  const NoisePool noise = opt.noise.empty() ? NoisePool{} : NoisePool::load(opt.noise);
  const auto corpus = augment(base, noise, cfg);

  OutputFile out(opt.out);
  for (const auto& ex : corpus) write_example(out.stream(), ex, format);
  out.commit();
}

void run_eval(const EvalOptions& opt) {
  MatchCriterion criterion;
  try {
    criterion = MatchCriterion::parse(opt.match);
  } catch (const ContractViolation& e) {
    throw UsageError(std::string("--match: ") + e.what());
  }
  const DatasetFormat format = parse_format("--format", opt.format);

  SpansByDocument gold, pred;
  for (const auto& ex : read_dataset(opt.gold, format)) {
    if (!gold.emplace(ex.id, ex.spans).second) {
      throw Error(opt.gold + ": duplicate document id \"" + ex.id + "\"");
    }
  }
  for (const auto& ex : read_dataset(opt.pred, format)) {
    if (!gold.count(ex.id)) {
      throw Error(opt.pred + ": document \"" + ex.id + "\" does not appear in " + opt.gold);
    }
    if (!pred.emplace(ex.id, ex.spans).second) {
      throw Error(opt.pred + ": duplicate document id \"" + ex.id + "\"");
    }
  }
  // A gold document with no prediction record counts as predicting nothing.
  for (const auto& [id, spans] : gold) pred.try_emplace(id);

  const EvalReport report = evaluate(pred, gold, criterion);
  if (!opt.out.empty()) {
    OutputFile out(opt.out);
    out.stream() << report_to_json(report).dump(2) << '\n';
    out.commit();
  }
  std::cout << render_table({{opt.name, report}});
}

void run_convert(const ConvertOptions& opt) {
  const DatasetFormat from = parse_format("--from", opt.from);
  const DatasetFormat to = parse_format("--to", opt.to);
  auto in = open_input(opt.input);
  OutputFile out(opt.out);
  auto sink = [&](AnnotatedExample ex) { write_example(out.stream(), ex, to); };
  try {
    if (from == DatasetFormat::jsonl) {
      read_jsonl(in, sink);
    } else {
      read_conll(in, sink);
    }
  } catch (const ParseError& e) {
    throw ParseError(e.line(), opt.input + ": " + e.what());
  }
  out.commit();
}

void run_tokenize(const TokenizeOptions& opt) {
  if (opt.vocab.empty()) throw UsageError("tokenize needs --vocab (or QX_VOCAB)");
  const auto vocab = load_vocab(opt.vocab, opt.lowercase);
  OutputFile out(opt.out);
  for_each_document(opt.input, [&](AnnotatedExample ex) {
    const auto t = tokenize_full(ex.text, *vocab);
    nlohmann::ordered_json j;
    j["id"] = ex.id;
    auto& words = j["words"] = nlohmann::ordered_json::array();
    for (const auto& w : t.words) words.push_back(w.text);
    j["pieces"] = t.pieces;
    auto& ranges = j["word_to_subtokens"] = nlohmann::ordered_json::array();
    for (const auto& r : t.alignment.word_to_subtokens) ranges.push_back({r.begin, r.end});
    out.stream() << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  });
  out.commit();
}

}  // namespace qx::cli
