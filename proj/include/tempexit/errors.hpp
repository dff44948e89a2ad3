#pragma once

#include <stdexcept>
#include <string>

namespace tempexit {

// Argument outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative numerical method exhausted its budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quantity is infinite for the requested parameters (untempered clock, mu = 0).
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace tempexit
