#pragma once

#include "logdiff/errors.hpp"
#include "logdiff/quadrature.hpp"

#include <string>

namespace logdiff {

/// Shape of the C^1 concave filler used on (1, 2].
enum class Continuation {
    CubicHermite,           ///< f(1), f'(1)=1, f(2)=1, f'(2)=0; concave iff f(1) in [1/3, 2/3]
    QuadraticThenConstant,  ///< f' falls linearly from 1 to 0 on [1, 1+2(1-f(1))], then f = 1
    LinearThenQuadratic,    ///< f' = 1 up to 2(1-f(1)), then falls linearly to 0 at 2
};

std::string to_string(Continuation c);

/// sigma(log sigma - log a) - (sigma - a), evaluated without cancellation near sigma = a.
double flux_bracket(double a, double sigma);

/// h(beta) = beta log beta - (beta - 1), so that flux_bracket(a, a*beta) = a*h(beta).
double flux_bracket_unit(double beta);

/// The flux function: zero below a, the closed form on [a, 1], a concave C^1
/// filler on (1, 2] and one from 2 on.
class FluxFunction {
public:
    explicit FluxFunction(double a);

    double a() const noexcept { return a_; }
    /// -log a.
    double log_inverse() const noexcept { return log_inverse_; }
    /// f(1) = 1 - (1 - a)/(-log a).
    double value_at_one() const noexcept { return f_one_; }
    Continuation continuation() const noexcept { return continuation_; }

    double value(double sigma) const;
    double derivative(double sigma) const;
    /// Second derivative; at the kinks sigma = a and sigma = 1 this is the right-sided value.
    double second_derivative(double sigma) const { return second_derivative_right(sigma); }
    double second_derivative_left(double sigma) const;
    double second_derivative_right(double sigma) const;

private:
    double filler_value(double x) const;
    double filler_derivative(double x) const;
    double filler_second(double x, bool left) const;

    double a_;
    double log_inverse_;
    double f_one_;
    Continuation continuation_;
    double knot_;  // interior knot of the piecewise fillers, in x = sigma - 1
};

/// The triple (r0, R, gamma) with s0 = -log r0, S = -log R and a = 2S/s0.
///
/// Valid specs have r0 in (1/2, 1), R in (r0^{1/3}, 1) and gamma in (0, 1/2).
struct CutoffSpec {
    double r0;
    double R;
    double gamma;
    double s0;
    double S;
    double a;

    static CutoffSpec make(double r0, double R, double gamma);
    /// Empty string when valid, otherwise the invariant that fails.
    static std::string validate(double r0, double R, double gamma);
};

/// phi(s) = f(2s/s0) with the flux function built for a = 2S/s0.
class Cutoff {
public:
    explicit Cutoff(const CutoffSpec& spec);

    const CutoffSpec& spec() const noexcept { return spec_; }
    const FluxFunction& flux() const noexcept { return flux_; }

    double value(double s) const;
    double derivative(double s) const;
    double second_derivative(double s) const;
    double second_derivative_left(double s) const;

private:
    CutoffSpec spec_;
    FluxFunction flux_;
    double scale_;  // 2 / s0
};

/// Numeric pieces of the Q bound for one gamma.
struct QConstants {
    double gamma;
    /// Far range: 2^{1+g}/(1-g).
    double far;
    /// int_1^{e^2} b^g (b-1)^{-2g} db.
    double near_integral;
    /// Near range: 2^{1+g} * near_integral.
    double near;
    /// (log 3/2)^{g-1}, absorbs (-log a)^{-1} into (-log a)^{-g}.
    double absorption;
    /// (1 - log 2/log 3)^{-g}, converts (-log a) to log s0 - log S.
    double conversion;
    /// (near * absorption + far) * conversion.
    double total;
};

QConstants q_constants(double gamma);

struct QReport {
    double q = 0.0;
    double q1 = 0.0;  ///< sigma in (e^2 a, 1); zero in the single-range case
    double q2 = 0.0;  ///< sigma in (a, min(e^2 a, 1))
    bool split = false;
    double error = 0.0;
    double error1 = 0.0;
    double error2 = 0.0;
    double analytic_bound = 0.0;
    double tracked_constant = 0.0;
    bool converged = false;
};

class QuadratureFailure : public NumericalError {
public:
    QuadratureFailure(const std::string& what, QReport partial)
        : NumericalError(what), partial_(partial) {}
    const QReport& partial() const noexcept { return partial_; }

private:
    QReport partial_;
};

/// Q = int_S^{s0/2} s^{2g} |phi''|^{1+g} phi^{-g} ds, computed in the
/// sigma = 2s/s0 variable. Q is integrated over the whole range in one pass;
/// Q1 and Q2 are separate passes so the split can be checked against it.
/// Throws QuadratureFailure with the partial report if the budget runs out.
QReport compute_Q(const CutoffSpec& spec, const quadrature::Options& options = {});

struct QBound {
    double bound;
    QConstants constants;
};

/// C(gamma) / (s0 (log s0 - log S)^gamma) with the tracked constant of q_constants.
QBound q_analytic_bound(const CutoffSpec& spec);

/// Both sides of a scalar inequality lhs <= rhs.
struct Certificate {
    double lhs;
    double rhs;
    double margin() const noexcept { return rhs - lhs; }
    bool holds(double tol = 0.0) const noexcept { return margin() >= -tol; }
};

/// log(1+x) <= x^lambda / lambda for lambda in (0,1), x >= 0.
Certificate log_power_inequality(double lambda, double x);
/// log(1+x) <= x - x^2/2 for x in (-1, 0].
Certificate log_quadratic_inequality(double x);
/// sinh s <= 3 s / (4 log 2) for s in (0, log 2].
Certificate sinh_chord_inequality(double s);

/// (sigma - a)^2 / (2 sigma) <= flux_bracket(a, sigma) for sigma > a.
Certificate bracket_quadratic_bound(double a, double sigma);
/// (sigma/2) log(sigma/a) <= flux_bracket(a, sigma) for sigma >= e^2 a.
Certificate bracket_log_bound(double a, double sigma);

}  // namespace logdiff
