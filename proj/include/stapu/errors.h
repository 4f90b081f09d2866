#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stapu {

/// Malformed user input: LTL text, model or mission files, CLI arguments.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LTL syntax error with a 1-based source position.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : InputError(what + " at " + std::to_string(line) + ":" +
                   std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A numeric procedure failed to converge or hit an internal limit.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The model falls outside the class an algorithm supports.
class UnsupportedModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit refusal to build a model above the configured state ceiling.
class CeilingExceeded : public std::runtime_error {
 public:
  CeilingExceeded(double size, double ceiling)
      : std::runtime_error("model size " + std::to_string(size) +
                           " exceeds ceiling " + std::to_string(ceiling)),
        size_(size) {}
  double size() const noexcept { return size_; }

 private:
  double size_;
};

}  // namespace stapu
