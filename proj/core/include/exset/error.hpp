#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace exset {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed or does not satisfy an operation's data requirements.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Structured parse failure of a file; carries the byte offset of the defect.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t byte_offset);
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// An estimator produced no data (e.g. every chord censored).
class EmptyDistributionError : public DataError {
 public:
  using DataError::DataError;
};

/// The phase does not connect the start face to the end face.
class NonPercolationError : public DataError {
 public:
  using DataError::DataError;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf or another numerical breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Receives non-fatal diagnostics. The default handler writes one line to stderr.
using WarningHandler = std::function<void(const std::string&)>;
/// Installs a handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

[[noreturn]] void fail_contract(const std::string& what);

inline void require(bool condition, const char* what) {
  if (!condition) fail_contract(what);
}

}  // namespace exset
