#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cournot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector lengths disagree with the instance dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain of a cost model (e.g. log argument <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid instance data or solver/experiment settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An inner solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cournot
