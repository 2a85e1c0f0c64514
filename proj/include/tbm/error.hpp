#pragma once

#include <stdexcept>
#include <string>

namespace tbm {

/// Caller passed arguments that violate an operation's preconditions.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data is malformed, inconsistent, or numerically unusable.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric is undefined for the given labels (e.g. a single class).
class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cross-validation could not build usable folds.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Run configuration is invalid.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tbm
