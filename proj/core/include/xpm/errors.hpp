#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xpm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scheme, field or parameter input.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A closed form was evaluated on (or within the guard of) one of its poles.
class PoleError : public Error {
public:
    PoleError(std::string quantity, double magnitude)
        : Error("pole: |" + quantity + "| = " + std::to_string(magnitude) + " below guard"),
          quantity_(std::move(quantity)), magnitude_(magnitude) {}

    const std::string& quantity() const noexcept { return quantity_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    std::string quantity_;
    double magnitude_;
};

/// The requested expression does not apply to this case (EIT/CPT, detuning premise).
class CaseError : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    SingularMatrix(double rcond)
        : Error("singular amplitude matrix (rcond = " + std::to_string(rcond) + ")"), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double t_reached, double residual, std::size_t steps)
        : Error(what + " (t = " + std::to_string(t_reached) + ", residual = " + std::to_string(residual) +
                ", steps = " + std::to_string(steps) + ")"),
          t_reached_(t_reached), residual_(residual), steps_(steps) {}

    double t_reached() const noexcept { return t_reached_; }
    double residual() const noexcept { return residual_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    double t_reached_;
    double residual_;
    std::size_t steps_;
};

class DegenerateSteadyState : public Error {
public:
    DegenerateSteadyState(int null_dimension, std::string fallback, const std::string& detail)
        : Error("degenerate steady state (null-space dimension " + std::to_string(null_dimension) +
                ", fallback: " + fallback + "): " + detail),
          null_dimension_(null_dimension), fallback_(std::move(fallback)) {}

    int null_dimension() const noexcept { return null_dimension_; }
    const std::string& fallback() const noexcept { return fallback_; }

private:
    int null_dimension_;
    std::string fallback_;
};

class SignatureMismatch : public Error {
public:
    using Error::Error;
};

/// Field and coherence do not belong to the same transition.
class PairingError : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

} // namespace xpm
