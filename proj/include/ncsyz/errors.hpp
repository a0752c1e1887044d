#pragma once

#include <stdexcept>
#include <string>

namespace ncsyz {

enum class ErrorCode {
    SingularBasis,
    SingularT,
    NotPositiveDefinite,
    SingularDeformation,
    SingularSlope,
    MoyalNotClosed,
    DegreeOverflow,
    HypothesisViolated,
    UnsupportedT,
    TruncationInsufficient,
    PreconditionFailed,
    IntegralityViolated,
    ContextMismatch,
    DimensionMismatch,
    UnknownIdentity,
    ValidationError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// field is the offending scenario path, e.g. "theta" or "T[1][0]"
class ValidationError : public Error {
public:
    ValidationError(const std::string& field, const std::string& msg)
        : Error(ErrorCode::ValidationError, field + ": " + msg), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

}  // namespace ncsyz
