#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trustlens {

/// Error classes. The CLI maps each class onto a distinct exit code.
enum class ErrorKind {
  Usage,
  Parse,
  Validation,
  Config,
  Domain,
  UndefinedScore,
  Transport,
  Precondition,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure carrying the 1-based line number of the offending record
/// (0 when the failure is not tied to a line).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::Parse,
              line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace trustlens
