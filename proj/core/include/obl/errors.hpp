#pragma once

#include <stdexcept>
#include <string>

namespace obl {

/// Bad or inconsistent input: malformed files, specs violating their
/// invariants, out-of-domain arguments. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed (root finder lost its bracket, curvature
/// changed sign, budget exhausted where that is fatal). CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& op, const std::string& what)
        : std::runtime_error(op + ": " + what), operation_(op) {}
    const std::string& operation() const { return operation_; }

private:
    std::string operation_;
};

}  // namespace obl
