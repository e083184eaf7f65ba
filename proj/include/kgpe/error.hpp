#pragma once

#include <stdexcept>
#include <string>

namespace kgpe {

// Invalid parameters or arguments outside an operation's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Non-convergence, boundary breaches and other numerical failures of a run.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double diagnostic = 0.0)
        : std::runtime_error(what), diagnostic_(diagnostic) {}

    // Last measured residual, boundary mass, etc.
    double diagnostic() const noexcept { return diagnostic_; }

private:
    double diagnostic_;
};

// Requested problem does not fit the dense-storage budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kgpe
