#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spmr {

/// Base of every error raised by the library. `exit_code()` is the CLI
/// contract: 2 for input/configuration problems, 3 for numerical failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Memory budget, enumeration budget or count overflow.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }
  int exit_code() const noexcept override { return 3; }

 private:
  std::size_t iteration_;
};

/// Clustering input carries no usable structure (e.g. an all-zero affinity).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

}  // namespace spmr
