#pragma once

#include <stdexcept>
#include <string>

namespace cellevo {

/// Bad configuration or invalid arguments supplied by the caller.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A solver produced a non-finite or overflowing state.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cellevo
