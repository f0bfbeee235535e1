#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hsricc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand dimensions or triplets do not match.
struct DimensionError : Error {
    using Error::Error;
};

// A claimed certificate (coercivity, positivity, schedule shape) failed its check.
struct CertificateError : Error {
    using Error::Error;
};

// A linear system inside a resolvent was (numerically) singular.
struct SingularSystemError : Error {
    using Error::Error;
};

// An iteration failed to converge; carries the last residual seen.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double last_residual_)
        : Error(what), last_residual(last_residual_) {}
    double last_residual;
};

// Observed contraction exceeded the certified rate (bad coercivity certificate).
struct ContractionError : Error {
    using Error::Error;
};

// An a-priori bound the solver monitors was violated.
struct BoundViolationError : Error {
    using Error::Error;
};

// Closed loop is not exponentially stable; carries the spectrum (real, imag pairs).
struct UnstableLoopError : Error {
    UnstableLoopError(const std::string& what, std::vector<double> re, std::vector<double> im)
        : Error(what), spectrum_re(std::move(re)), spectrum_im(std::move(im)) {}
    std::vector<double> spectrum_re;
    std::vector<double> spectrum_im;
};

// Problem data does not satisfy the hypotheses of either solvable route.
struct HypothesesError : Error {
    using Error::Error;
};

// Bad or missing run configuration.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace hsricc
