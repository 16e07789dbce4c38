#pragma once

#include <stdexcept>
#include <string>

namespace kerrpb {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation was not met by its input.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Non-finite values encountered where finite numbers are required.
class NumericError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Iterative or direct solver failed; carries the last residual seen.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The Liouvillian has more than one stationary state.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

/// A steady state handed to a correlation routine is not stationary under L.
class StaleSteadyState : public Error {
public:
    using Error::Error;
};

/// The covariance has not decayed within the sampled lag window.
class WindowTooShort : public Error {
public:
    using Error::Error;
};

}  // namespace kerrpb
