#include "qx/output_file.hpp"

#include <iostream>
#include <random>

#include "qx/error.hpp"

namespace qx::cli {

OutputFile::OutputFile(const std::string& target) {
  if (target == "-") {
    to_stdout_ = true;
    return;
  }
  target_ = target;
  std::random_device rd;
  temp_ = target_;
  temp_ += ".tmp" + std::to_string(rd());
  file_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!file_) throw Error("cannot write " + target_.string());
}

OutputFile::~OutputFile() {
  if (to_stdout_ || committed_) return;
  file_.close();
  std::error_code ec;
  std::filesystem::remove(temp_, ec);
}

std::ostream& OutputFile::stream() { return to_stdout_ ? std::cout : file_; }

void OutputFile::commit() {
  if (to_stdout_) {
    std::cout.flush();
    return;
  }
  file_.close();
  if (!file_) throw Error("write failed for " + target_.string());
  std::filesystem::rename(temp_, target_);
  committed_ = true;
}

}  // namespace qx::cli
