#pragma once

#include <stdexcept>
#include <string>

namespace signum {

/// Violated precondition or domain error (CLI exit code 2).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration or memory budget exceeded (CLI exit code 3).
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed config or input file (CLI exit code 1). Carries a line number
/// when the offending line is known; line 0 means "whole file".
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace signum
