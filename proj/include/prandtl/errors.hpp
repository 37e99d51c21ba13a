#pragma once

#include <stdexcept>
#include <string>

namespace prandtl {

// Every failure carries the name of the module that raised it.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Raised when the Picard map stops contracting or the stepper blows up.
class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace prandtl
