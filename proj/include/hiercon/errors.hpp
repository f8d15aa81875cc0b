#pragma once

#include <stdexcept>
#include <string>

namespace hiercon {

/// Malformed structure: out-of-range indices, inconsistent layer sizes.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method failed to converge within its cap.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hiercon
