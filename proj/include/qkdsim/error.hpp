#pragma once

#include <stdexcept>

namespace qkd {

// Bad caller input: out-of-range parameter, malformed configuration.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical contract did not hold (non-Hermitian operand, probability
// below tolerance, completeness residual). Signals a defect in an operator
// or an evolved state, not bad user input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Not enough data to evaluate: empty correlation cell, too few sifted
// rounds. Distinct from a threshold-triggered protocol abort, which is a
// regular result.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qkd
