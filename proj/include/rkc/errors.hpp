#pragma once

#include <stdexcept>
#include <string>

namespace rkc {

/// Base class for every failure reported by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain (non-finite input, bad stage
/// count, malformed grid, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A weight b_i is zero where the double adjoint requires b_i != 0.
class DegenerateWeights : public Error {
public:
    using Error::Error;
};

/// I - zA is singular: z is a pole of the stability function.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Tableau shape the generic applicator cannot handle (implicit stages
/// that stay implicit even after stage reversal).
class UnsupportedTableau : public Error {
public:
    using Error::Error;
};

/// The generic Runge-Kutta applicator is restricted to oracle-scale
/// stage counts; larger tableaus must go through the recurrences.
class OracleSizeExceeded : public Error {
public:
    using Error::Error;
};

/// A stage produced a non-finite value. Carries the failing stage and,
/// when available, the time step index.
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, long step, int stage)
        : Error(what), step_(step), stage_(stage) {}
    long step() const { return step_; }
    int stage() const { return stage_; }

private:
    long step_;
    int stage_;
};

/// A costate rescaling coefficient alpha_j vanished.
class DegenerateRescaling : public Error {
public:
    using Error::Error;
};

/// Newton failed to solve grad_u H = 0 at a stage.
class StationarityFailure : public Error {
public:
    StationarityFailure(const std::string& what, long step, int stage, double residual)
        : Error(what), step_(step), stage_(stage), residual_(residual) {}
    long step() const { return step_; }
    int stage() const { return stage_; }
    double residual() const { return residual_; }

private:
    long step_;
    int stage_;
    double residual_;
};

/// The line-search objective evaluated to a non-finite value.
class LineSearchFailure : public Error {
public:
    using Error::Error;
};

}  // namespace rkc
