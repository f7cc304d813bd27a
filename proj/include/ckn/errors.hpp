#pragma once

#include <stdexcept>
#include <string>

namespace ckn {

/// Malformed input: bad rationals, inconsistent tuples, unknown names.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition of a parameter map or construction does not hold.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested integral is infinite under the local power-law model.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero denominator in a ratio (the test function vanishes identically).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A test-function construction could not satisfy its own guards.
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ckn
