#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace logdiff {

/// Argument outside the mathematical domain of an operation (r outside (0,1), s <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Too few nodes for a stencil or a quadrature rule.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// A grid does not resolve the feature an operation needs to integrate.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two trajectories or states that cannot be compared node by node.
class IncompatibleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Quadrature or iteration that ran out of budget.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Newton failure inside one implicit step. Callers may retry with a smaller time step.
class StepFailure : public NumericalError {
public:
    StepFailure(const std::string& what, double residual, int iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Configuration problems. Every problem found is listed, not just the first one.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

}  // namespace logdiff
