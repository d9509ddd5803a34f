#pragma once

#include <stdexcept>
#include <string>

namespace mhdbfed {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A state handed to the solver violates a structural precondition
/// (wrong sizes, non-finite entries, divergence residual above tolerance).
struct InvalidStateError : Error {
    using Error::Error;
};

/// The integrator produced non-finite values and retries were exhausted.
struct BlowUpError : Error {
    BlowUpError(const std::string& what, double when) : Error(what), t(when) {}
    double t;  ///< simulation time at which the step failed
};

/// A snapshot or time-series file is malformed or truncated.
struct FileFormatError : Error {
    using Error::Error;
};

/// Restart parameters disagree with what a snapshot carries.
struct ParamMismatchError : Error {
    using Error::Error;
};

/// A configuration file failed to parse or validate.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace mhdbfed
