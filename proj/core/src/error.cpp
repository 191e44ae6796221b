#include "sogs/error.hpp"

namespace sogs {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return "invalid-input";
    case ErrorCode::kParseError:
      return "parse-error";
    case ErrorCode::kRangeError:
      return "range-error";
    case ErrorCode::kUnsupportedCodec:
      return "unsupported-codec";
    case ErrorCode::kDecodeError:
      return "decode-error";
    case ErrorCode::kIoError:
      return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace sogs
