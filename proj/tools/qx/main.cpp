// qx: batch front end for question extraction.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <iostream>

#include "qx/commands.hpp"
#include "qx/error.hpp"

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

void add_vocab(CLI::App* cmd, std::string& target) {
  cmd->add_option("--vocab", target, "Subword vocabulary, one entry per line")
      ->envname("QX_VOCAB");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qx::cli;

  CLI::App app{"Extract question spans from student queries and exam text"};
  app.require_subcommand(1);

  ExtractOptions ex;
  auto* extract = app.add_subcommand("extract", "Tag documents and write extracted questions");
  auto* sources = extract->add_option_group("source");
  sources->add_option("--input", ex.input, "Text file (one document per line) or .jsonl dataset");
  sources->add_option("--ocr", ex.ocr, "OCR JSON for a single page set");
  sources->require_option(1);
  extract->add_option("--tagger", ex.tagger, "rule:<ruleset|default>, remote:<url> or oracle:<file>")
      ->capture_default_str();
  extract->add_option("--policy", ex.policy, "Decoding of malformed tags")
      ->check(CLI::IsMember({"strict", "repair"}))
      ->capture_default_str();
  extract->add_option("--parallel", ex.parallel, "Concurrent remote requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract->add_option("--timeout-ms", ex.timeout_ms, "Remote request timeout")->capture_default_str();
  extract->add_option("--max-len", ex.max_len, "Remote window size in subtokens")->capture_default_str();
  extract->add_option("--stride", ex.stride, "Overlap between remote windows")->capture_default_str();
  add_vocab(extract, ex.vocab);
  extract->add_option("--out", ex.out, "Output JSONL ('-' for stdout)")->capture_default_str();
  std::string extract_format = "jsonl";
  extract->add_option("--format", extract_format, "Output format")
      ->check(CLI::IsMember({"jsonl"}))
      ->capture_default_str();

  AugmentOptions au;
  auto* aug = app.add_subcommand("augment", "Build a noisy training corpus from a clean base");
  aug->add_option("--base", au.base, "Base dataset (JSONL)")->required()->check(CLI::ExistingFile);
  aug->add_option("--noise", au.noise, "Noise snippets, one per line")->check(CLI::ExistingFile);
  aug->add_option("--count", au.count, "Number of examples to generate")->capture_default_str();
  aug->add_option("--seed", au.seed, "RNG seed")->capture_default_str();
  aug->add_option("--p-prepend", au.p_prepend)->capture_default_str();
  aug->add_option("--p-append", au.p_append)->capture_default_str();
  aug->add_option("--p-insert", au.p_insert)->capture_default_str();
  aug->add_option("--max-insert", au.max_insert)->capture_default_str();
  aug->add_option("--format", au.format, "jsonl or conll")->capture_default_str();
  aug->add_option("--out", au.out, "Output file ('-' for stdout)")->capture_default_str();

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold spans");
  eval->add_option("--gold", ev.gold)->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", ev.pred)->required()->check(CLI::ExistingFile);
  eval->add_option("--match", ev.match, "exact, text or iou:<t>")->capture_default_str();
  eval->add_option("--name", ev.name, "Model name for the report table")->capture_default_str();
  eval->add_option("--format", ev.format, "Format of both inputs")->capture_default_str();
  eval->add_option("--out", ev.out, "Also write the JSON report here");

  ConvertOptions cv;
  auto* convert = app.add_subcommand("convert", "Convert datasets between JSONL and CoNLL");
  convert->add_option("--from", cv.from)->required();
  convert->add_option("--to", cv.to)->required();
  convert->add_option("--input", cv.input)->required()->check(CLI::ExistingFile);
  convert->add_option("--out", cv.out)->capture_default_str();

  TokenizeOptions tk;
  auto* tokenize = app.add_subcommand("tokenize", "Show word and subword tokenization");
  tokenize->add_option("--input", tk.input)->required()->check(CLI::ExistingFile);
  add_vocab(tokenize, tk.vocab);
  tokenize->add_flag("--lowercase", tk.lowercase, "ASCII-lowercase before vocabulary lookup");
  tokenize->add_option("--out", tk.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*extract) run_extract(ex);
    if (*aug) run_augment(au);
    if (*eval) run_eval(ev);
    if (*convert) run_convert(cv);
    if (*tokenize) run_tokenize(tk);
  } catch (const UsageError& e) {
    std::cerr << "qx: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "qx: error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
