#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

namespace qx::cli {

/// Output destination that only appears once complete. "-" means stdout.
/// Otherwise bytes go to a sibling temp file that commit() renames over the
/// target; if commit() is never reached the temp file is deleted, so a
/// failed run leaves no partial output behind.
class OutputFile {
 public:
  explicit OutputFile(const std::string& target);
  ~OutputFile();
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;

  std::ostream& stream();
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream file_;
  bool to_stdout_ = false;
  bool committed_ = false;
};

}  // namespace qx::cli
