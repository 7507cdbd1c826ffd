#pragma once

#include <stdexcept>
#include <string>

namespace atl {

// Bad user input: config files, surface parameters, grid setup.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime numerical failure: instability, divergence, degenerate fits.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Caller violated an operation precondition (out-of-stencil index,
// asymmetric matrix, point outside the grid hull, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace atl
