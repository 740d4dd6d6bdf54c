#include "aoiseq/error.hpp"

namespace aoiseq {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NotPrime: return "not_prime";
    case ErrorCode::NotCoprime: return "not_coprime";
    case ErrorCode::QTooSmall: return "q_too_small";
    case ErrorCode::PeriodMismatch: return "period_mismatch";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::PreconditionViolated: return "precondition_violated";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::InfeasibleSize: return "infeasible_size";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what)
    , code_(code)
{
}

} // namespace aoiseq
