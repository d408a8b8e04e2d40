#include "logdiff/flux.hpp"

#include "logdiff/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace logdiff {

namespace {

constexpr double kSeriesRadius = 0.1;

// h(1+x)/x^2 = sum_{n>=2} (-1)^n x^{n-2} / (n(n-1)); accurate for |x| < kSeriesRadius.
double unit_bracket_ratio_series(double x) {
    double sum = 0.0;
    double power = 1.0;
    for (int n = 2; n < 40; ++n) {
        const double term = power / (static_cast<double>(n) * (n - 1));
        sum += (n % 2 == 0) ? term : -term;
        power *= x;
        if (std::abs(power) < 1e-18) {
            break;
        }
    }
    return sum;
}

// h(1+x)/x^2 for any x > -1, x != 0.
double unit_bracket_ratio(double x) {
    if (std::abs(x) < kSeriesRadius) {
        return unit_bracket_ratio_series(x);
    }
    return flux_bracket_unit(1.0 + x) / (x * x);
}

void require_a(double a, const char* where) {
    if (!(a > 0.0 && a < 1.0)) {
        std::ostringstream msg;
        msg << where << ": parameter a must lie in (0, 1), got " << a;
        throw DomainError(msg.str());
    }
}

}  // namespace

std::string to_string(Continuation c) {
    switch (c) {
    case Continuation::CubicHermite:
        return "cubic_hermite";
    case Continuation::QuadraticThenConstant:
        return "quadratic_then_constant";
    case Continuation::LinearThenQuadratic:
        return "linear_then_quadratic";
    }
    return "unknown";
}

double flux_bracket_unit(double beta) {
    if (!(beta > 0.0)) {
        throw DomainError("flux_bracket_unit: beta must be positive");
    }
    const double x = beta - 1.0;
    if (std::abs(x) < kSeriesRadius) {
        return x * x * unit_bracket_ratio_series(x);
    }
    return beta * std::log(beta) - x;
}

double flux_bracket(double a, double sigma) {
    require_a(a, "flux_bracket");
    if (!(sigma > 0.0)) {
        throw DomainError("flux_bracket: sigma must be positive");
    }
    return a * flux_bracket_unit(sigma / a);
}

// ---------------------------------------------------------------------------
// FluxFunction

FluxFunction::FluxFunction(double a) : a_(a) {
    require_a(a, "FluxFunction");
    log_inverse_ = -std::log(a);
    f_one_ = 1.0 - (1.0 - a) / log_inverse_;
    const double missing = 1.0 - f_one_;  // area under f' on [1,2]
    if (f_one_ >= 1.0 / 3.0 && f_one_ <= 2.0 / 3.0) {
        continuation_ = Continuation::CubicHermite;
        knot_ = 0.0;
    } else if (f_one_ >= 0.5) {
        continuation_ = Continuation::QuadraticThenConstant;
        knot_ = 2.0 * missing;
    } else {
        continuation_ = Continuation::LinearThenQuadratic;
        knot_ = 2.0 * missing - 1.0;
    }
}

double FluxFunction::filler_value(double x) const {
    const double f1 = f_one_;
    switch (continuation_) {
    case Continuation::CubicHermite: {
        const double x2 = x * x;
        const double x3 = x2 * x;
        return f1 * (2 * x3 - 3 * x2 + 1) + (x3 - 2 * x2 + x) + (-2 * x3 + 3 * x2);
    }
    case Continuation::QuadraticThenConstant:
        if (x >= knot_) {
            return 1.0;
        }
        return f1 + x - x * x / (2.0 * knot_);
    case Continuation::LinearThenQuadratic:
        if (x <= knot_) {
            return f1 + x;
        }
        {
            const double span = 1.0 - knot_;
            const double rest = 1.0 - x;
            return f1 + knot_ + (span * span - rest * rest) / (2.0 * span);
        }
    }
    return 1.0;
}

double FluxFunction::filler_derivative(double x) const {
    const double f1 = f_one_;
    switch (continuation_) {
    case Continuation::CubicHermite:
        return f1 * (6 * x * x - 6 * x) + (3 * x * x - 4 * x + 1) + (-6 * x * x + 6 * x);
    case Continuation::QuadraticThenConstant:
        return x >= knot_ ? 0.0 : 1.0 - x / knot_;
    case Continuation::LinearThenQuadratic:
        return x <= knot_ ? 1.0 : (1.0 - x) / (1.0 - knot_);
    }
    return 0.0;
}

double FluxFunction::filler_second(double x, bool left) const {
    switch (continuation_) {
    case Continuation::CubicHermite:
        return x * (12 * f_one_ - 6) + 2 - 6 * f_one_;
    case Continuation::QuadraticThenConstant:
        if (x > knot_ || (!left && x == knot_)) {
            return 0.0;
        }
        return -1.0 / knot_;
    case Continuation::LinearThenQuadratic:
        if (x < knot_ || (left && x == knot_)) {
            return 0.0;
        }
        return -1.0 / (1.0 - knot_);
    }
    return 0.0;
}

double FluxFunction::value(double sigma) const {
    if (sigma <= a_) {
        return 0.0;
    }
    if (sigma <= 1.0) {
        return flux_bracket(a_, sigma) / log_inverse_;
    }
    if (sigma >= 2.0) {
        return 1.0;
    }
    return filler_value(sigma - 1.0);
}

double FluxFunction::derivative(double sigma) const {
    if (sigma <= a_) {
        return 0.0;
    }
    if (sigma <= 1.0) {
        return (std::log(sigma) - std::log(a_)) / log_inverse_;
    }
    if (sigma >= 2.0) {
        return 0.0;
    }
    return filler_derivative(sigma - 1.0);
}

double FluxFunction::second_derivative_left(double sigma) const {
    if (sigma <= a_) {
        return 0.0;
    }
    if (sigma <= 1.0) {
        return 1.0 / (sigma * log_inverse_);
    }
    if (sigma > 2.0) {
        return 0.0;
    }
    return filler_second(sigma - 1.0, true);
}

double FluxFunction::second_derivative_right(double sigma) const {
    if (sigma < a_) {
        return 0.0;
    }
    if (sigma < 1.0) {
        return 1.0 / (sigma * log_inverse_);
    }
    if (sigma >= 2.0) {
        return 0.0;
    }
    return filler_second(sigma - 1.0, false);
}

// ---------------------------------------------------------------------------
// CutoffSpec / Cutoff

std::string CutoffSpec::validate(double r0, double R, double gamma) {
    if (!(r0 > 0.5 && r0 < 1.0)) {
        std::ostringstream msg;
        msg << "r0 = " << r0 << " violates r0 in (1/2, 1)";
        return msg.str();
    }
    const double lower = std::cbrt(r0);
    if (!(R > lower && R < 1.0)) {
        std::ostringstream msg;
        msg << "R = " << R << " violates R > r0^{1/3} = " << lower << " and R < 1";
        return msg.str();
    }
    if (!(gamma > 0.0 && gamma < 0.5)) {
        std::ostringstream msg;
        msg << "gamma = " << gamma << " violates gamma in (0, 1/2)";
        return msg.str();
    }
    return {};
}

CutoffSpec CutoffSpec::make(double r0, double R, double gamma) {
    if (auto problem = validate(r0, R, gamma); !problem.empty()) {
        throw DomainError("CutoffSpec: " + problem);
    }
    CutoffSpec spec{r0, R, gamma, -std::log(r0), -std::log(R), 0.0};
    spec.a = 2.0 * spec.S / spec.s0;
    return spec;
}

Cutoff::Cutoff(const CutoffSpec& spec) : spec_(spec), flux_(spec.a), scale_(2.0 / spec.s0) {}

double Cutoff::value(double s) const {
    if (!(s > 0.0)) {
        throw DomainError("Cutoff::value: s must be positive");
    }
    return flux_.value(scale_ * s);
}

double Cutoff::derivative(double s) const {
    if (!(s > 0.0)) {
        throw DomainError("Cutoff::derivative: s must be positive");
    }
    return scale_ * flux_.derivative(scale_ * s);
}

double Cutoff::second_derivative(double s) const {
    if (!(s > 0.0)) {
        throw DomainError("Cutoff::second_derivative: s must be positive");
    }
    return scale_ * scale_ * flux_.second_derivative_right(scale_ * s);
}

double Cutoff::second_derivative_left(double s) const {
    if (!(s > 0.0)) {
        throw DomainError("Cutoff::second_derivative_left: s must be positive");
    }
    return scale_ * scale_ * flux_.second_derivative_left(scale_ * s);
}

// ---------------------------------------------------------------------------
// Q

namespace {

// int_1^{1+c} beta^{gamma-1} h(beta)^{-gamma} d beta with beta - 1 = c u^p, p = 1/(1-2 gamma).
// h(beta) = x^2 q(x) with x = c u^p, and u^{p-1} x^{-2 gamma} = c^{-2 gamma}, so the
// transformed integrand beta^{gamma-1} c^{1-2 gamma} p q(x)^{-gamma} is bounded at u = 0.
quadrature::Result near_range(double gamma, double c, const quadrature::Options& options) {
    const double p = 1.0 / (1.0 - 2.0 * gamma);
    const double prefactor = std::pow(c, 1.0 - 2.0 * gamma) * p;
    auto integrand = [=](double u) {
        const double x = c * std::pow(u, p);
        const double beta = 1.0 + x;
        return prefactor * std::pow(beta, gamma - 1.0) * std::pow(unit_bracket_ratio(x), -gamma);
    };
    return quadrature::gauss_kronrod(integrand, 0.0, 1.0, options);
}

// int_{e^lo}^{e^hi} beta^{gamma-1} h(beta)^{-gamma} d beta in alpha = log beta.
quadrature::Result far_range(double gamma, double lo, double hi,
                             const quadrature::Options& options) {
    auto integrand = [=](double alpha) {
        const double beta = std::exp(alpha);
        return std::pow(beta, gamma) * std::pow(flux_bracket_unit(beta), -gamma);
    };
    return quadrature::gauss_kronrod(integrand, lo, hi, options);
}

}  // namespace

QConstants q_constants(double gamma) {
    if (!(gamma > 0.0 && gamma < 0.5)) {
        throw DomainError("q_constants: gamma must lie in (0, 1/2)");
    }
    QConstants k{};
    k.gamma = gamma;
    k.far = std::pow(2.0, 1.0 + gamma) / (1.0 - gamma);

    // int_1^{e^2} b^g (b-1)^{-2g} db with b - 1 = c u^p: integrand b^g c^{1-2g} p.
    const double c = std::exp(2.0) - 1.0;
    const double p = 1.0 / (1.0 - 2.0 * gamma);
    const double prefactor = std::pow(c, 1.0 - 2.0 * gamma) * p;
    auto integrand = [=](double u) { return prefactor * std::pow(1.0 + c * std::pow(u, p), gamma); };
    const auto near = quadrature::gauss_kronrod(integrand, 0.0, 1.0, {0.0, 1e-14, 2000});
    if (!near.converged) {
        throw NumericalError("q_constants: near-range constant did not converge");
    }
    k.near_integral = near.value;
    k.near = std::pow(2.0, 1.0 + gamma) * k.near_integral;
    k.absorption = std::pow(std::log(1.5), gamma - 1.0);
    k.conversion = std::pow(1.0 - std::log(2.0) / std::log(3.0), -gamma);
    k.total = (k.near * k.absorption + k.far) * k.conversion;
    return k;
}

QBound q_analytic_bound(const CutoffSpec& spec) {
    const QConstants k = q_constants(spec.gamma);
    const double separation = std::log(spec.s0) - std::log(spec.S);
    return QBound{k.total / (spec.s0 * std::pow(separation, spec.gamma)), k};
}

QReport compute_Q(const CutoffSpec& spec, const quadrature::Options& options) {
    const double gamma = spec.gamma;
    const double log_inverse = -std::log(spec.a);
    const double prefactor = 2.0 / (spec.s0 * log_inverse);
    const double beta_max = 1.0 / spec.a;
    const double beta_split = std::exp(2.0);

    QReport report;
    report.split = beta_split < beta_max;

    // Whole range in one adaptive pass, independent of the split below.
    const auto whole = near_range(gamma, beta_max - 1.0, options);
    report.q = prefactor * whole.value;
    report.error = prefactor * whole.error;
    bool converged = whole.converged;

    if (report.split) {
        const auto near = near_range(gamma, beta_split - 1.0, options);
        const auto far = far_range(gamma, 2.0, log_inverse, options);
        report.q2 = prefactor * near.value;
        report.error2 = prefactor * near.error;
        report.q1 = prefactor * far.value;
        report.error1 = prefactor * far.error;
        converged = converged && near.converged && far.converged;
    } else {
        report.q2 = report.q;
        report.error2 = report.error;
    }

    const QBound bound = q_analytic_bound(spec);
    report.analytic_bound = bound.bound;
    report.tracked_constant = bound.constants.total;
    report.converged = converged;
    if (!converged) {
        std::ostringstream msg;
        msg << "compute_Q: quadrature did not converge (partial Q = " << report.q
            << ", Q1 = " << report.q1 << ", Q2 = " << report.q2 << ", error = " << report.error
            << ")";
        throw QuadratureFailure(msg.str(), report);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scalar inequalities

Certificate log_power_inequality(double lambda, double x) {
    if (!(lambda > 0.0 && lambda < 1.0) || !(x >= 0.0)) {
        throw DomainError("log_power_inequality: need lambda in (0,1) and x >= 0");
    }
    return {std::log1p(x), std::pow(x, lambda) / lambda};
}

Certificate log_quadratic_inequality(double x) {
    if (!(x > -1.0 && x <= 0.0)) {
        throw DomainError("log_quadratic_inequality: need x in (-1, 0]");
    }
    return {std::log1p(x), x - 0.5 * x * x};
}

Certificate sinh_chord_inequality(double s) {
    if (!(s > 0.0 && s <= std::numbers::ln2)) {
        throw DomainError("sinh_chord_inequality: need s in (0, log 2]");
    }
    return {std::sinh(s), 3.0 * s / (4.0 * std::numbers::ln2)};
}

Certificate bracket_quadratic_bound(double a, double sigma) {
    require_a(a, "bracket_quadratic_bound");
    if (!(sigma > a)) {
        throw DomainError("bracket_quadratic_bound: need sigma > a");
    }
    const double d = sigma - a;
    return {d * d / (2.0 * sigma), flux_bracket(a, sigma)};
}

Certificate bracket_log_bound(double a, double sigma) {
    require_a(a, "bracket_log_bound");
    if (!(sigma >= std::exp(2.0) * a)) {
        throw DomainError("bracket_log_bound: need sigma >= e^2 a");
    }
    return {0.5 * sigma * std::log(sigma / a), flux_bracket(a, sigma)};
}

}  // namespace logdiff
