#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace mpsedge {

enum class ErrorKind {
    NotHermitian,
    EmptyInput,
    ConvergenceFailure,
    DimensionMismatch,
    InvalidArgument,
    NotIrreducible,
    NotPrimitive,
    SingularRho,
    CornerZero,
    ContractionFail,
    NotInjective,
    Inconsistent,
    ConditionViolated,
    DecompositionFail,
    InvalidLambda,
    StructureViolation,
    NotClassA,
    SingularSystem,
    OutOfRange,
    DegenerateInteraction,
    TooLarge,
    NLessThanRange,
    NoGap,
    FitFailure,
    InvalidTriple,
    SchemaError,
    IoError,
};

inline const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::SingularRho: return "SingularRho";
    case ErrorKind::CornerZero: return "CornerZero";
    case ErrorKind::ContractionFail: return "ContractionFail";
    case ErrorKind::NotInjective: return "NotInjective";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::DecompositionFail: return "DecompositionFail";
    case ErrorKind::InvalidLambda: return "InvalidLambda";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::NotClassA: return "NotClassA";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegenerateInteraction: return "DegenerateInteraction";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NLessThanRange: return "NLessThanRange";
    case ErrorKind::NoGap: return "NoGap";
    case ErrorKind::FitFailure: return "FitFailure";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// short numeric rendering for diagnostics
inline std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond) fail(kind, what);
}

} // namespace mpsedge
