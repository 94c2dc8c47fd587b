#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qx::cli {

/// Bad flag values detected before any work starts; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtractOptions {
  std::string input;
  std::string ocr;
  std::string tagger = "rule:default";
  std::string policy = "repair";
  std::string vocab;
  std::string out = "-";
  std::size_t parallel = 4;
  long timeout_ms = 5000;
  std::size_t max_len = 512;
  std::size_t stride = 128;
};

struct AugmentOptions {
  std::string base;
  std::string noise;
  std::size_t count = 22000;
  std::uint64_t seed = 42;
  double p_prepend = 0.5;
  double p_append = 0.5;
  double p_insert = 0.3;
  std::size_t max_insert = 2;
  std::string format = "jsonl";
  std::string out = "-";
};

struct EvalOptions {
  std::string gold;
  std::string pred;
  std::string match = "text";
  std::string name = "Model";
  std::string format = "jsonl";
  std::string out;  // JSON report; empty means none
};

struct ConvertOptions {
  std::string from;
  std::string to;
  std::string input;
  std::string out = "-";
};

struct TokenizeOptions {
  std::string input;
  std::string vocab;
  bool lowercase = false;
  std::string out = "-";
};

void run_extract(const ExtractOptions& opt);
void run_augment(const AugmentOptions& opt);
void run_eval(const EvalOptions& opt);
void run_convert(const ConvertOptions& opt);
void run_tokenize(const TokenizeOptions& opt);

}  // namespace qx::cli
