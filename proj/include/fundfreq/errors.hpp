#pragma once

#include <stdexcept>
#include <string>

namespace fundfreq {

/// Argument outside the admissible parameter region (e.g. lambda not in (0, pi/p)).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical quantity the computation depends on is unusable.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// X_j^T X_j is (numerically) singular; happens as j*lambda approaches 0 or pi.
class DegenerateFrequencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Second derivative of the criterion too small to take a Newton step.
class CurvatureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A proposed iterate left (0, pi/p). Carries the rejected value.
class BoundaryError : public NumericalError {
public:
    BoundaryError(const std::string& what, double proposed)
        : NumericalError(what), proposed_(proposed) {}

    double proposed() const noexcept { return proposed_; }

private:
    double proposed_;
};

}  // namespace fundfreq
