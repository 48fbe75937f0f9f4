#pragma once

#include <stdexcept>
#include <string>

namespace flexfn {

// Bad user-supplied configuration (parameters, grids, schedules).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a trustworthy number (NaN, no convergence, singular solve).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The equilibrium is not uniquely determined because f is not strictly decreasing.
class AmbiguityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace flexfn
