#pragma once

#include <stdexcept>
#include <string>

namespace epmech {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A rate or coupling divides by a zero decay rate.
struct ZeroDenominatorError : Error {
    using Error::Error;
};

/// Two-mode reduction requested for omega_1 != omega_2.
struct NondegenerateModesError : Error {
    using Error::Error;
};

/// Model parameters violate a type invariant (non-finite, negative coupling, ...).
struct InvalidModelError : Error {
    using Error::Error;
};

/// Operation requires the balanced-gain / red-sideband / equal-coupling condition.
struct NotPseudoHermitianError : Error {
    using Error::Error;
};

/// Spectrum matches neither the broken nor the unbroken eigenvalue pattern.
struct AmbiguousPhaseError : Error {
    using Error::Error;
};

/// Coalescence indicator keeps one sign over the search bracket.
struct NoSignChangeError : Error {
    using Error::Error;
};

/// Integrator step exceeds the sampling bound 2*pi/(20*omega_max).
struct StepTooLargeError : Error {
    using Error::Error;
};

/// Trajectory has too few envelope peaks to fit.
struct TooShortError : Error {
    using Error::Error;
};

/// Config document is not syntactically valid.
struct ParseError : Error {
    using Error::Error;
};

/// Config document violates one or more schema constraints.
struct ValidationError : Error {
    using Error::Error;
};

/// Non-finite value reached the exporter outside the truncation protocol.
struct SerializationError : Error {
    using Error::Error;
};

}  // namespace epmech
