#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clicklayout {

enum class ErrorKind {
  kParse,
  kValidation,
  kNotFound,
  kNoMatch,
  kArgument,
  kTransport,
  kUnknownPrompt,
  kUnsupportedInstruction,
  kExtraction,
  kPrecondition,
  kGeneration,
  kProtocol,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error raised by the library. `kind()` is what the HTTP layer
/// maps onto status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset)
      : Error(ErrorKind::kParse, message), byte_offset_(byte_offset) {}

  [[nodiscard]] std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  ValidationError(const std::string& context, std::vector<std::string> violations);

  [[nodiscard]] const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

/// A response that could not be turned into a layout. Carries the raw model
/// output so callers can surface it for debugging.
class ExtractionError : public Error {
 public:
  ExtractionError(ErrorKind kind, const std::string& message, std::string raw)
      : Error(kind, message), raw_(std::move(raw)) {}

  [[nodiscard]] const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace clicklayout
