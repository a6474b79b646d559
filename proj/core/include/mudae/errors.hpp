#pragma once

#include <stdexcept>
#include <string>

namespace mudae {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed caller input: non-finite entries, dimension mismatches, bad options.
class InputError : public Error {
public:
    using Error::Error;
};

// An iterative kernel failed to converge within its budget (eigensolver, etc.).
class NumericError : public Error {
public:
    using Error::Error;
};

// The algebraic block D is singular; the reduced-system stability criterion
// is undefined at such a point.
class ReductionError : public Error {
public:
    using Error::Error;
};

// Newton iteration did not converge. Distinct from instability.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// A stability certificate could not be constructed (non-Hurwitz reduced
// Jacobian, Lyapunov failure, exhausted scaling search).
class ConstructionError : public Error {
public:
    using Error::Error;
};

// The model lacks the data required for the requested operation
// (e.g. residual evaluation on a Jacobian-only model).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// A combinatorial budget would be exceeded (box vertex enumeration).
class BudgetError : public Error {
public:
    using Error::Error;
};

// A file could not be parsed; the message carries field context.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace mudae
