#pragma once

#include <stdexcept>
#include <string>

namespace kte {

enum class ErrorCode {
    InvalidArgument,
    InvalidSpec,
    Parse,
    OutOfDomain,
    NotSuperlinear,
    Delta2Violation,
    InvalidOrder,
    Unbounded,
    SizeLimit,
    QuadratureFailure,
    PreconditionViolation,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
    if (!condition) fail(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace kte
