#pragma once

#include <stdexcept>
#include <string>

namespace rsme {

// Invalid distribution / contamination / estimator parameter.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Dimension or index mismatch between arguments.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation applied to an object in the wrong state (e.g. contaminating twice).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Non-finite value produced or consumed by an iterative routine.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rsme
