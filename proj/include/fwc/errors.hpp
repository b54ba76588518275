#pragma once

#include <stdexcept>
#include <string>

namespace fwc {

// Base class for all library failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid user-facing configuration: bad grid sizes, reversed bounds,
// malformed JSON documents, missing config sections.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Evaluation outside a declared domain (tabulated potentials, quadrature
// intervals that cross classically forbidden regions, grids that touch them).
class DomainError : public Error {
public:
    using Error::Error;
};

// The physical model itself is inconsistent at the requested point,
// e.g. a negative radicand under the square-root Hamiltonian.
class ModelError : public Error {
public:
    using Error::Error;
};

// A root finder or level solver could not do its job (lost bracket,
// non-monotone residual, no bound-state well present).
class SolverError : public Error {
public:
    using Error::Error;
};

// A state object violates its invariants (unnormalized amplitudes,
// undefined observables for the given spin).
class StateError : public Error {
public:
    using Error::Error;
};

// Numerical blowup or backend failure during otherwise valid evolution.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace fwc
