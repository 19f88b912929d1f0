#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cargo {

/// Malformed input text. Carries the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A structurally complete input that breaks one or more model invariants.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) out += "; " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

/// Two locations that must be connected have no path between them.
class UnreachableError : public std::runtime_error {
public:
  UnreachableError(long a, long b, const std::string& what)
      : std::runtime_error(what), a_(a), b_(b) {}
  long first() const noexcept { return a_; }
  long second() const noexcept { return b_; }

private:
  long a_;
  long b_;
};

/// An iterative numerical method failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Failure inside a pipeline stage; the message is prefixed with the stage name.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

}  // namespace cargo
