#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gema {

enum class ErrorKind {
    Domain,
    Convexity,
    SingularMetric,
    DimensionMismatch,
    Boundary,
    NotInFamily,
    ZeroFunction,
    Grid,
    Parse,
    NotSquare,
    ZeroDeterminant,
    NotInvertible,
    NonPositiveWeight,
    ZeroVector,
    NoSolutionFound,
    SingularBasis,
    NotSymmetric,
    NotInCone,
    UnknownPotential,
    Overflow,
};

constexpr std::string_view error_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::Convexity: return "ConvexityError";
        case ErrorKind::SingularMetric: return "SingularMetric";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::Boundary: return "BoundaryError";
        case ErrorKind::NotInFamily: return "NotInFamily";
        case ErrorKind::ZeroFunction: return "ZeroFunction";
        case ErrorKind::Grid: return "GridError";
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::NotSquare: return "NotSquare";
        case ErrorKind::ZeroDeterminant: return "ZeroDeterminant";
        case ErrorKind::NotInvertible: return "NotInvertible";
        case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NoSolutionFound: return "NoSolutionFound";
        case ErrorKind::SingularBasis: return "SingularBasis";
        case ErrorKind::NotSymmetric: return "NotSymmetric";
        case ErrorKind::NotInCone: return "NotInCone";
        case ErrorKind::UnknownPotential: return "UnknownPotential";
        case ErrorKind::Overflow: return "OverflowError";
    }
    return "Error";
}

// Base of every error raised by the library. kind() is what the CLI reports.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

   private:
    ErrorKind kind_;
    std::string detail_;
};

template <ErrorKind K>
class ErrorOf : public Error {
   public:
    explicit ErrorOf(const std::string& what) : Error(K, what) {}
};

using DomainError = ErrorOf<ErrorKind::Domain>;
using ConvexityError = ErrorOf<ErrorKind::Convexity>;
using SingularMetric = ErrorOf<ErrorKind::SingularMetric>;
using DimensionMismatch = ErrorOf<ErrorKind::DimensionMismatch>;
using BoundaryError = ErrorOf<ErrorKind::Boundary>;
using NotInFamily = ErrorOf<ErrorKind::NotInFamily>;
using ZeroFunction = ErrorOf<ErrorKind::ZeroFunction>;
using GridError = ErrorOf<ErrorKind::Grid>;
using ParseError = ErrorOf<ErrorKind::Parse>;
using NotSquare = ErrorOf<ErrorKind::NotSquare>;
using ZeroDeterminant = ErrorOf<ErrorKind::ZeroDeterminant>;
using NotInvertible = ErrorOf<ErrorKind::NotInvertible>;
using NonPositiveWeight = ErrorOf<ErrorKind::NonPositiveWeight>;
using ZeroVector = ErrorOf<ErrorKind::ZeroVector>;
using NoSolutionFound = ErrorOf<ErrorKind::NoSolutionFound>;
using SingularBasis = ErrorOf<ErrorKind::SingularBasis>;
using NotSymmetric = ErrorOf<ErrorKind::NotSymmetric>;
using NotInCone = ErrorOf<ErrorKind::NotInCone>;
using UnknownPotential = ErrorOf<ErrorKind::UnknownPotential>;
using OverflowError = ErrorOf<ErrorKind::Overflow>;

}  // namespace gema
