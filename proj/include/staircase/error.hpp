#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace staircase {

enum class ErrorCode {
  PolicyUndefined,
  ColumnOutOfRange,
  LevelOutOfRange,
  StageMissing,
  CannotExtend,
  BadReference,
  DepthInsufficient,
  ResourceLimit,
  InvalidArgument,
  ParseError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace staircase
