#pragma once

#include <stdexcept>
#include <string>

namespace tfuse {

// Bad input data or configuration; the CLI maps this to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A broken internal invariant; the CLI maps this to exit code 2.
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

// Not enough observations to compute the requested statistic.
struct InsufficientDataError : InputError {
    using InputError::InputError;
};

}  // namespace tfuse
