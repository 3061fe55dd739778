#pragma once

#include <stdexcept>
#include <string>

namespace varwave {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: invalid profile, bad config value, mismatched grids.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A mathematical hypothesis required by the method does not hold.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// Iterations failed to converge, resonant truncation, non-finite values.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace varwave
