#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sogs {

enum class ErrorCode {
  kInvalidInput,
  kParseError,
  kRangeError,
  kUnsupportedCodec,
  kDecodeError,
  kIoError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library is a sogs::Error; callers switch on
// code() (the CLI maps it to an exit status).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sogs
