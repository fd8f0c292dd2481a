#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace antflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural violation of a MarkedGraph invariant.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The nest cannot reach the food through positive-weight edges, or a
/// linear system turned out singular.
class DisconnectedError : public Error {
 public:
  using Error::Error;
};

/// Path enumeration exceeded its configured ceiling.
class PathLimitError : public Error {
 public:
  using Error::Error;
};

/// A walk hit its step cap in strict mode.
class WalkCapError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine did not meet its stopping criterion.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The requested operation does not apply to this graph family.
class FamilyError : public Error {
 public:
  using Error::Error;
};

}  // namespace antflow
