#pragma once

#include <stdexcept>
#include <string>

namespace aoiseq {

enum class ErrorCode {
    InvalidArgument,
    NotPrime,
    NotCoprime,
    QTooSmall,
    PeriodMismatch,
    EmptyInput,
    PreconditionViolated,
    BudgetExceeded,
    InfeasibleSize,
    ParseError,
    Internal,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception carrying a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace aoiseq
