// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_ERROR_H_
#define TASRES_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tasres {

// Error categories. The CLI maps each one to a distinct exit code.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kUnsupportedFormat,
  kChannelCount,
  kConfig,
  kCheckpointMismatch,
  kNumerical,
  kEmptyInput,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace tasres

#endif  // TASRES_ERROR_H_
