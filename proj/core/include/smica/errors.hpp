#pragma once

#include <stdexcept>
#include <string>

namespace smica {

// Bad arguments or malformed configuration: caller error.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failures detected at runtime.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateCovarianceError : NumericalError {
    using NumericalError::NumericalError;
};

struct IllConditionedError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateChannelError : NumericalError {
    using NumericalError::NumericalError;
};

struct DivergenceError : NumericalError {
    DivergenceError(const std::string& what, long epoch_)
        : NumericalError(what), epoch(epoch_) {}
    long epoch;
};

// File parsing and I/O.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace smica
