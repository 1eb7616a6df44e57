#include "kterm/error.hpp"

namespace kterm {

const char* code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedDim: return "UnsupportedDim";
    case ErrorCode::TailError: return "TailError";
    case ErrorCode::TailNotCertifiable: return "TailNotCertifiable";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::BandViolation: return "BandViolation";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::EmptyExpansion: return "EmptyExpansion";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(code_name(code)) + ": " + detail), code_(code), detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

} // namespace kterm
