#pragma once

#include <stdexcept>
#include <string>

namespace fockforge {

/// Base class for all numerical-guard and contract violations raised by the
/// library. CLI maps subtypes onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CutoffTooSmall : Error {
    using Error::Error;
};

struct IndexOutOfCutoff : Error {
    using Error::Error;
};

struct SpaceMismatch : Error {
    using Error::Error;
};

struct ZeroMeanPhoton : Error {
    using Error::Error;
};

struct LeakageExceeded : Error {
    using Error::Error;
};

struct CutoffConvergenceFailed : Error {
    using Error::Error;
};

struct TraceDriftExceeded : Error {
    using Error::Error;
};

struct StepTooLarge : Error {
    using Error::Error;
};

struct PulseOutsideWindow : Error {
    using Error::Error;
};

struct GridTooSmall : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

struct MissingParameters : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace fockforge
