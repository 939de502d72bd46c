#pragma once

#include <stdexcept>
#include <string>

namespace mbp {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed external input: CSV/JSON that cannot be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures (missing file, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

/// A value violated an operation's domain precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested target lies outside the achievable [min, max] range.
class OutOfRangeError : public DomainError {
public:
    OutOfRangeError(const std::string& what, double achievable_min, double achievable_max)
        : DomainError(what), min_(achievable_min), max_(achievable_max) {}
    double achievable_min() const { return min_; }
    double achievable_max() const { return max_; }

private:
    double min_;
    double max_;
};

/// Price budget below the cheapest offered version.
class BudgetTooLowError : public DomainError {
public:
    BudgetTooLowError(const std::string& what, double minimum_price)
        : DomainError(what), minimum_price_(minimum_price) {}
    double minimum_price() const { return minimum_price_; }

private:
    double minimum_price_;
};

/// Breakpoints that cannot form a feasible pricing curve.
class InfeasiblePointsError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An error curve too degenerate to invert (flat after smoothing).
class CurveInvalidError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Singular or rank-deficient training system.
class IllPosedError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Problem instance exceeds the configured desk-scale limits.
class ResourceError : public Error {
public:
    using Error::Error;
};

}  // namespace mbp
