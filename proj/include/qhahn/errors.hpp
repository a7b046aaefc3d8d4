// errors.hpp — exception types shared by all qhahn modules
#pragma once

#include <stdexcept>
#include <string>

namespace qhahn {

// Mathematical domain violations: poles, degenerate data, rejected weights,
// unsupported parameter ranges. CLI maps these to exit code 3.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A truncated series/product failed its tail test within the iteration cap,
// or an iterative solver did not converge. CLI maps these to exit code 4.
class NonConvergenceError : public std::runtime_error {
public:
    explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qhahn
