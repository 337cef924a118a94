#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbstat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input row. `line()` is 1-based and counts the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A statistic was requested over an empty sample (no members, no pairs).
class NoDataError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (zero denominator, order above cap, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace mbstat
