#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace integrals {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegreeMismatch : public Error {
 public:
  DegreeMismatch(std::size_t a, std::size_t b)
      : Error("degree mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// A configured size gate (enumeration threshold, aut gate, ...) was exceeded.
class SizeGateExceeded : public Error {
 public:
  SizeGateExceeded(const std::string& what, const std::string& size, const std::string& gate)
      : Error(what + ": size " + size + " exceeds gate " + gate) {}
};

/// An operation's documented precondition does not hold for its arguments.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
              ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace integrals
