#include "kte/error.hpp"

namespace kte {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NotSuperlinear: return "NotSuperlinear";
        case ErrorCode::Delta2Violation: return "Delta2Violation";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::SizeLimit: return "SizeLimit";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace kte
