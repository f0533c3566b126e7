#pragma once

#include <stdexcept>
#include <string>

namespace rc {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configured size limit (degree cache, index-set cap) was exceeded.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

// A numerical routine failed (non-convergence, singular system).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration or mismatched artifact.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rc
