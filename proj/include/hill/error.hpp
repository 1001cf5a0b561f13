#pragma once

#include <stdexcept>
#include <string>

namespace hill {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A contour node or evaluation point lies too close to a (free or perturbed) eigenvalue.
class ProximityError : public Error {
public:
    using Error::Error;
};

/// z - L is singular or too badly conditioned to invert.
class SingularError : public Error {
public:
    SingularError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// The resolvent perturbation series is not contractive at the requested point.
class ContractionError : public Error {
public:
    ContractionError(const std::string& what, double measured_hs)
        : Error(what), measured_hs_(measured_hs) {}
    double measured_hs() const noexcept { return measured_hs_; }

private:
    double measured_hs_;
};

/// A brute-force enumeration would exceed its work budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Quadrature or projector checks did not reach their tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Rethrows the in-flight exception as the same library error type with `context` prepended.
[[noreturn]] void rethrow_with_context(const std::string& context);

}  // namespace hill
