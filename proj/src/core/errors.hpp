#pragma once

#include <stdexcept>
#include <string>

namespace plpfrail {

/// Base of every error raised by the core. The C API maps the concrete
/// subclass onto a status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad row, missing header). Carries the line number.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Values outside the model's domain (time >= T, unknown cause, z <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Invalid run configuration or precondition on options.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Improper posterior, undefined estimator, non-finite computation.
class NumericalError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace plpfrail
