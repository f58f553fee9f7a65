#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netrand {

/// Invalid model, design or experiment parameters supplied by the caller.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Broken precondition between library components (dimension mismatch,
/// read outside the revealed prefix, incomplete sign vector).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Operation not defined for this graph kind (e.g. density of a weighted graph).
class UnsupportedKind : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exhaustive enumeration refused because the instance is too large.
class LimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace netrand
