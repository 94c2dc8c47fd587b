#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qx/types.hpp"

namespace qx {

struct AugmentConfig {
  std::size_t target_count = 22000;
  double p_prepend_noise = 0.5;
  double p_append_noise = 0.5;
  double p_insert_question = 0.3;
  std::size_t max_inserted_questions = 2;
  std::uint64_t seed = 42;

  /// Throws ContractViolation on a zero target or a probability outside
  /// [0, 1].
  void validate() const;
  bool needs_noise() const noexcept {
    return p_prepend_noise > 0.0 || p_append_noise > 0.0;
  }
};

/// Question-free text snippets used as padding around real questions.
class NoisePool {
 public:
  NoisePool() = default;
  explicit NoisePool(std::vector<std::string> snippets);

  /// One snippet per line; blank lines are skipped.
  static NoisePool load(const std::filesystem::path& path);

  const std::vector<std::string>& snippets() const noexcept {
    return snippets_;
  }
  bool empty() const noexcept { return snippets_.empty(); }

  /// Throws ContractViolation if a snippet equals (whitespace-collapsed,
  /// case-folded) some gold question text of `base`.
  void check_against(const std::vector<AnnotatedExample>& base) const;

 private:
  std::vector<std::string> snippets_;
};

/// Appends a period when the snippet has no terminal punctuation.
std::string normalize_noise(std::string_view snippet);

/// Expands `base` to exactly cfg.target_count examples. Base examples are
/// drawn in reshuffled passes (so every example is reused evenly), then
/// optionally wrapped in noise and given extra questions copied verbatim
/// from other base examples. Output is a pure function of the arguments.
std::vector<AnnotatedExample> augment(const std::vector<AnnotatedExample>& base,
                                      const NoisePool& noise,
                                      const AugmentConfig& cfg);

/// True iff every span text of `example` is a span text of some base
/// example.
bool verify_augmented(const AnnotatedExample& example,
                      const std::vector<AnnotatedExample>& base);

}  // namespace qx
