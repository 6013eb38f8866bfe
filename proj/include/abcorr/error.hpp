#pragma once

#include <stdexcept>
#include <string>

namespace abcorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operand dimensions do not factor or do not match.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Truncated results failed to converge before reaching the dimension cap.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// A density-matrix invariant failed. `invariant()` names which one
/// ("schema", "dimension", "hermiticity", "trace", "positivity").
class ValidationError : public Error {
public:
    ValidationError(std::string invariant, const std::string& what)
        : Error(invariant + ": " + what), invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

/// Eigensolver failure or similar.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A trace that must be real came back with a significant imaginary part.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Zero fringe intensity in a ratio denominator.
class DegeneracyError : public Error {
public:
    DegeneracyError(double sigma_a, double sigma_b, const std::string& what)
        : Error(what), sigma_a_(sigma_a), sigma_b_(sigma_b) {}

    double sigma_a() const noexcept { return sigma_a_; }
    double sigma_b() const noexcept { return sigma_b_; }

private:
    double sigma_a_;
    double sigma_b_;
};

/// Calibration target lies outside the attainable range.
class NoRootError : public Error {
public:
    NoRootError(double lo, double hi, const std::string& what)
        : Error(what), lo_(lo), hi_(hi) {}

    double attainable_lo() const noexcept { return lo_; }
    double attainable_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace abcorr
