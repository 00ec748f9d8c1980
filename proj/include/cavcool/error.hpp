#pragma once

#include <stdexcept>
#include <string>

namespace cavcool {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration. `line` is 0 when the problem
/// is not tied to a specific input line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A computation produced an unusable result (non-finite values, trace drift,
/// singular systems, fit failure).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavcool
