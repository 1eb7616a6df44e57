#pragma once

#include <stdexcept>
#include <string>

namespace kterm {

enum class ErrorCode {
    NonConvergence,
    DomainError,
    UnsupportedDim,
    TailError,
    TailNotCertifiable,
    QuadratureFailure,
    SymmetryViolation,
    BandViolation,
    NotDisjoint,
    EmptyExpansion,
    ShapeMismatch,
    DegenerateFit,
    UsageError,
    ParseError,
    InvalidArgument,
};

const char* code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);
    ErrorCode code() const { return code_; }
    const std::string& detail() const { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

} // namespace kterm
