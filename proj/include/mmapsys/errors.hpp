#pragma once

#include <stdexcept>
#include <string>

namespace mmapsys {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model parameters (PH invariants, thresholds, stochasticity).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes that do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Singular or otherwise failed numerical solve.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Model file syntax or content problems, carrying the offending line.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line),
        detail_(what) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string file_;
  int line_;
  std::string detail_;
};

}  // namespace mmapsys
