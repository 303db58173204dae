#pragma once

#include <stdexcept>
#include <string>

namespace ncd {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid caller-supplied argument (k out of range, bad level, unknown name).
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// A value is mathematically undefined for the given input.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent input data (corpus files, class coverage, matrix files).
class DataError : public Error {
public:
  using Error::Error;
};

class ParseError : public DataError {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Not enough documents in a class to draw the requested sample.
class SamplingError : public DataError {
public:
  using DataError::DataError;
};

/// The compression library reported a failure.
class BackendError : public Error {
public:
  using Error::Error;
};

}  // namespace ncd
