#pragma once

#include <stdexcept>
#include <string>

namespace abcage {

/// Raised for malformed configuration files or invalid scenario fields.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical routine cannot complete (integrator underflow,
/// fit breakdown). The message carries the failure location where known.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace abcage
