#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marginforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed LibSVM input. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid parameters or configuration (bad ranges, empty inputs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage could not produce a usable result.
class PipelineError : public Error {
 public:
  using Error::Error;
};

/// An API was called outside its contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// File system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace marginforge
