#pragma once

#include <stdexcept>
#include <string>

namespace ionweave {

// Base of every error thrown by the library. The CLI maps each subclass to an
// exit code (see exit_code()).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed config, invalid parameter, dimension mismatch.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Drive frequency sits inside the guard band of a motional mode.
class ResonanceError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// The designer could not realize the requested couplings.
class InfeasibleDesignError : public Error {
public:
    InfeasibleDesignError(const std::string& what, int suggested_k_max = 0)
        : Error(what), suggested_k_max_(suggested_k_max) {}
    int suggested_k_max() const { return suggested_k_max_; }

private:
    int suggested_k_max_;
};

// Solver non-convergence, unstable configuration, truncation failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

inline int exit_code(const std::exception& e)
{
    if (dynamic_cast<const ValidationError*>(&e)) return 1;
    if (dynamic_cast<const InfeasibleDesignError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    return 1;
}

} // namespace ionweave
