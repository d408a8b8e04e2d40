#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace logdiff::quadrature {

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-12;
    /// Maximum number of subintervals kept by the adaptive scheme.
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    /// Sum of the Gauss/Kronrod discrepancies over all subintervals.
    double error = 0.0;
    std::size_t intervals = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 10/21-point Gauss-Kronrod quadrature of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the total
/// error is below max(abs_tol, rel_tol * |value|) or the interval budget is
/// spent. The integrand is never evaluated at a or b, so integrable endpoint
/// singularities are tolerated (slowly); remove them by substitution when
/// accuracy matters.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     const Options& options = {});

/// Composite trapezoid rule of nodal data y(x) over [lo, hi] with linear
/// interpolation in the partial cells at either end. x must be strictly
/// increasing and [lo, hi] must lie inside [x.front(), x.back()].
double trapezoid(std::span<const double> x, std::span<const double> y, double lo, double hi);

/// Linear interpolation of nodal data at a point inside [x.front(), x.back()].
double interpolate(std::span<const double> x, std::span<const double> y, double at);

}  // namespace logdiff::quadrature
