#pragma once

#include <stdexcept>
#include <string>

namespace rsense {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or physical input violates its domain (non-positive mass, P <= 0, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A function argument lies outside the function's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The Bogoliubov radicand is negative: the condensate is dynamically unstable.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double k) : Error(what), k_(k) {}
    double k() const noexcept { return k_; }

private:
    double k_;
};

/// A derivative was requested where the dispersion vanishes.
class SingularDerivative : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature could not meet its tolerance within the panel budget.
class QuadratureFailure : public Error {
public:
    QuadratureFailure(const std::string& what, double panel_lo, double panel_hi, double panel_error)
        : Error(what), lo_(panel_lo), hi_(panel_hi), err_(panel_error) {}
    double worst_panel_lo() const noexcept { return lo_; }
    double worst_panel_hi() const noexcept { return hi_; }
    double worst_panel_error() const noexcept { return err_; }

private:
    double lo_, hi_, err_;
};

/// Root finder called without a sign change on the bracket.
class BracketError : public Error {
public:
    using Error::Error;
};

/// The dispersion has a structure the model does not describe (e.g. > 2 stationary points).
class ModelAssumptionError : public Error {
public:
    using Error::Error;
};

/// Frequency coincides with a band edge of the roton spectrum.
class BoundaryError : public Error {
public:
    using Error::Error;
};

/// Operation requires the roton regime and the parameter point is outside it.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Sampling step too coarse to resolve the roton oscillation.
class ResolutionError : public Error {
public:
    using Error::Error;
};

} // namespace rsense
