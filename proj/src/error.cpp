#include "clicklayout/error.hpp"

namespace clicklayout {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kValidation: return "validation_error";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kNoMatch: return "no_match";
    case ErrorKind::kArgument: return "argument_error";
    case ErrorKind::kTransport: return "transport_error";
    case ErrorKind::kUnknownPrompt: return "unknown_prompt";
    case ErrorKind::kUnsupportedInstruction: return "unsupported_instruction";
    case ErrorKind::kExtraction: return "extraction_error";
    case ErrorKind::kPrecondition: return "precondition_failed";
    case ErrorKind::kGeneration: return "generation_error";
    case ErrorKind::kProtocol: return "protocol_error";
    case ErrorKind::kIo: return "io_error";
  }
  return "error";
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(ErrorKind::kValidation, join_violations(violations)),
      violations_(std::move(violations)) {}

ValidationError::ValidationError(const std::string& context,
                                 std::vector<std::string> violations)
    : Error(ErrorKind::kValidation, context + ": " + join_violations(violations)),
      violations_(std::move(violations)) {}

}  // namespace clicklayout
