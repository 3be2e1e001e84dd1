#pragma once

#include <stdexcept>
#include <string>

namespace piezoplate {

/// Malformed or unreadable configuration text.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain (invalid parameters, bad indices).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver a result of the requested quality.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw PreconditionError(message);
}

}  // namespace piezoplate
