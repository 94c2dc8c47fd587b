#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace qx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (length mismatch, overlapping
/// spans, out-of-range index, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A tag sequence is not well-formed IOB2 and the strict policy was requested.
class MalformedTags : public Error {
 public:
  MalformedTags(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Input could not be parsed. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Remote tagger failures. Each carries the endpoint and request id.
class RemoteError : public Error {
 public:
  RemoteError(std::string endpoint, std::string request_id,
              const std::string& what)
      : Error(what),
        endpoint_(std::move(endpoint)),
        request_id_(std::move(request_id)) {}
  const std::string& endpoint() const noexcept { return endpoint_; }
  const std::string& request_id() const noexcept { return request_id_; }

 private:
  std::string endpoint_;
  std::string request_id_;
};

class TransportError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

class TimeoutError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

/// Server answered, but the answer breaks the wire contract.
class MalformedResponse : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

/// Server answered with a non-2xx status.
class RemoteStatusError : public RemoteError {
 public:
  RemoteStatusError(std::string endpoint, std::string request_id, int status,
                    const std::string& what)
      : RemoteError(std::move(endpoint), std::move(request_id), what),
        status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace qx
