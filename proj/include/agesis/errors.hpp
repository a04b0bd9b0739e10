#pragma once
#include <stdexcept>
#include <string>

namespace agesis {

// Root of the library's error hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter violated its admissible range (which one is named in the message).
struct RangeError : Error {
    using Error::Error;
};

// Recruitment does not exceed mortality, so no endemic equilibrium exists.
struct EndemicityError : Error {
    using Error::Error;
};

// The frequency equation has no positive root: no imaginary-axis crossing.
struct NoCrossingError : Error {
    using Error::Error;
};

// A root that must be simple has (numerically) vanishing derivative.
struct DegenerateRootError : Error {
    using Error::Error;
};

// Newton iteration exhausted its iteration budget.
struct MaxIterError : Error {
    using Error::Error;
};

// Newton iteration hit a (near-)zero derivative.
struct DerivativeVanishedError : Error {
    using Error::Error;
};

// Evaluation requested at a pole of the transfer function.
struct PoleError : Error {
    using Error::Error;
};

// An exponential-sum integral over [0, inf) does not converge.
struct DivergentError : Error {
    using Error::Error;
};

// The resolvent is (numerically) singular at a required second-harmonic or
// zero-frequency point, so the quadratic-order inversion would blow up.
struct ResonanceError : Error {
    ResonanceError(const std::string& msg, double det_magnitude)
        : Error(msg), det_magnitude(det_magnitude) {}
    double det_magnitude;
};

// The integrated state left the admissible range (|value| > 1e12).
struct BlowupError : Error {
    BlowupError(const std::string& msg, double time) : Error(msg), time(time) {}
    double time;
};

// A simulation configuration violates a structural requirement.
struct ConfigError : Error {
    using Error::Error;
};

// A time series does not carry enough oscillation data to diagnose.
struct InsufficientDataError : Error {
    using Error::Error;
};

}  // namespace agesis
