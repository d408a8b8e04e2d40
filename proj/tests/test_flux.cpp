#include "logdiff/flux.hpp"

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

using namespace logdiff;
using doctest::Approx;

namespace {

// Q in u = sigma - a by Boost tanh-sinh, sharing nothing with compute_Q.
double q_by_tanh_sinh(const CutoffSpec& spec, double lo, double hi) {
    const double a = spec.a;
    const double L = -std::log(a);
    const double g = spec.gamma;
    // bracket / u^2, so the u^{-2g} singularity is factored out exactly
    auto scaled = [a](double u) {
        const double x = u / a;
        if (x < 1e-3) {
            double sum = 0.0, p = 1.0;
            for (int n = 2; n < 12; ++n) {
                sum += p / (n * (n - 1.0));
                p *= -x;
            }
            return sum / a;
        }
        return ((a + u) * std::log1p(x) - u) / (u * u);
    };
    auto f = [&](double u) {
        return 2.0 / spec.s0 * std::pow(a + u, g - 1.0) / L * std::pow(u, -2.0 * g) * std::pow(scaled(u), -g);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, lo - a, hi - a);
}

}  // namespace

TEST_CASE("flux function closed-form values") {
    const double a = std::exp(-2.0);
    const FluxFunction f(a);
    CHECK(f.value(a) == 0.0);
    CHECK(f.derivative(a) == 0.0);
    // oracle: 1 - (1 - e^{-2})/2
    CHECK(f.value(1.0) == Approx(0.567667641618306346).epsilon(1e-15));
    CHECK(f.value(3.0) == 1.0);
    CHECK(f.derivative(3.0) == 0.0);
    CHECK(f.derivative(1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(f.value(0.5 * a) == 0.0);
    CHECK_THROWS_AS(FluxFunction(1.0), DomainError);
    CHECK_THROWS_AS(FluxFunction(0.0), DomainError);
}

TEST_CASE("flux function is C1, monotone and bounded for every continuation") {
    for (double a : {0.01, 0.05, 0.135, 0.3, 0.45, 0.6, 0.66}) {
        CAPTURE(a);
        const FluxFunction f(a);
        double prev = 0.0;
        for (int i = 0; i <= 3000; ++i) {
            const double sigma = 2.5 * i / 3000.0;
            const double v = f.value(sigma);
            CHECK(v >= prev - 1e-15);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
        for (double kink : {a, 1.0, 2.0}) {
            const double h = 1e-11;
            CHECK(std::abs(f.derivative(kink + h) - f.derivative(kink - h)) < 1e-8);
        }
        for (int i = 1; i < 200; ++i) {
            CHECK(f.second_derivative(1.0 + i / 200.0) <= 1e-14);
        }
    }
    // f(1) = 0.683, 0.419, 0.217
    CHECK(FluxFunction(0.05).continuation() == Continuation::QuadraticThenConstant);
    CHECK(FluxFunction(0.3).continuation() == Continuation::CubicHermite);
    CHECK(FluxFunction(0.6).continuation() == Continuation::LinearThenQuadratic);
}

TEST_CASE("flux bracket is accurate near sigma = a") {
    const double a = 0.2;
    const double u = 1e-9;
    // leading term u^2 / (2a)
    CHECK(flux_bracket(a, a + u) == Approx(u * u / (2 * a)).epsilon(1e-8));
    CHECK(flux_bracket_unit(1.0) == 0.0);
}

TEST_CASE("cut-off spec validation cites the invariants") {
    CHECK(CutoffSpec::validate(0.4, 0.9, 0.25).find("r0 in (1/2, 1)") != std::string::npos);
    CHECK(CutoffSpec::validate(0.6, 0.6, 0.25).find("R > r0^{1/3}") != std::string::npos);
    CHECK(CutoffSpec::validate(0.6, 0.9, 0.5).find("gamma in (0, 1/2)") != std::string::npos);
    CHECK_THROWS_AS(CutoffSpec::make(0.6, 0.8, 0.25), DomainError);
    const auto spec = CutoffSpec::make(std::exp(-0.5), std::exp(-0.1), 0.25);
    CHECK(spec.s0 == Approx(0.5));
    CHECK(spec.S == Approx(0.1));
    CHECK(spec.a == Approx(0.4));
}

TEST_CASE("cut-off support and concavity") {
    const auto spec = CutoffSpec::make(0.75, 0.99, 0.25);
    const Cutoff phi(spec);
    for (int i = 1; i <= 100; ++i) {
        CHECK(phi.value(spec.S * i / 100.0) == 0.0);
        CHECK(phi.value(spec.s0 * (1.0 + i / 10.0)) == 1.0);
        const double s = spec.s0 * (0.5 + 0.5 * i / 101.0);
        CHECK(phi.second_derivative(s) <= 1e-12);
    }
    CHECK_THROWS_AS(phi.value(0.0), DomainError);
}

TEST_CASE("Q regression values from the mpmath oracle") {
    struct Case {
        double r0, R, gamma, q, q1, q2, bound;
    };
    const std::vector<Case> cases{
        {std::exp(-0.5), std::exp(-0.1), 0.25, 10.1857454797627522, 0.0, 10.1857454797627522, 76.3704713984921353},
        {0.75, 0.99, 0.25, 10.8331982823293375, 1.58313779459007456, 9.25006048773926294, 110.472041519884958},
        {0.6, 0.999, 0.1, 3.96702861290281443, 2.27446046819211997, 1.69256814471069446, 58.4297753043994828},
        {0.9, 0.99, 0.4, 86.6486250737764924, 0.0, 86.6486250737764924, 461.660886215453803},
    };
    for (const auto& c : cases) {
        CAPTURE(c.r0);
        CAPTURE(c.gamma);
        const auto spec = CutoffSpec::make(c.r0, c.R, c.gamma);
        const auto q = compute_Q(spec);
        CHECK(q.converged);
        CHECK(q.q == Approx(c.q).epsilon(1e-10));
        CHECK(q.q1 == Approx(c.q1).epsilon(1e-10));
        CHECK(q.q2 == Approx(c.q2).epsilon(1e-10));
        CHECK(q.analytic_bound == Approx(c.bound).epsilon(1e-10));
        CHECK(q.q <= q.analytic_bound);
        if (q.split) {
            CHECK(std::abs(q.q - q.q1 - q.q2) <= q.error + q.error1 + q.error2 + 1e-13 * q.q);
        }
    }
}

TEST_CASE("Q agrees with a Boost tanh-sinh oracle") {
    for (double r0 : {0.55, 0.75, 0.95}) {
        for (double f : {0.1, 0.5, 0.9}) {
            for (double g : {0.05, 0.25, 0.45}) {
                const double R = std::cbrt(r0) + f * (1.0 - std::cbrt(r0));
                const auto spec = CutoffSpec::make(r0, R, g);
                CAPTURE(spec.a);
                CAPTURE(g);
                CHECK(compute_Q(spec).q == Approx(q_by_tanh_sinh(spec, spec.a, 1.0)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("Q bound scales with the log distance exactly") {
    const double r0 = 0.7, g = 0.3;
    const double s0 = -std::log(r0);
    // S1, S2 chosen with log s0 - log S2 = 2 (log s0 - log S1)
    const double S1 = s0 / 4.0;
    const double S2 = s0 / 16.0;
    const auto b1 = q_analytic_bound(CutoffSpec::make(r0, std::exp(-S1), g)).bound;
    const auto b2 = q_analytic_bound(CutoffSpec::make(r0, std::exp(-S2), g)).bound;
    CHECK(b1 / b2 == Approx(std::pow(2.0, g)).epsilon(1e-13));
}

TEST_CASE("tracked constant pieces match the oracle") {
    const auto c = q_constants(0.25);
    CHECK(c.near_integral == Approx(6.48425446494983867).epsilon(1e-11));
    CHECK(c.total == Approx(43.0094642242636047).epsilon(1e-11));
    CHECK(q_constants(0.1).total == Approx(35.8421632940198581).epsilon(1e-11));
    CHECK(q_constants(0.4).total == Approx(68.4560742513851045).epsilon(1e-11));
    CHECK_THROWS_AS(q_constants(0.5), DomainError);
}

TEST_CASE("Q stays finite at the a -> 2/3 edge and is stable under tolerance halving") {
    const double r0 = 0.8;
    const auto spec = CutoffSpec::make(r0, std::cbrt(r0) * (1.0 + 1e-9), 0.45);
    CHECK(spec.a == Approx(2.0 / 3.0).epsilon(1e-6));
    quadrature::Options loose;
    loose.rel_tol = 1e-8;
    quadrature::Options tight;
    tight.rel_tol = 0.5e-8;
    const auto a = compute_Q(spec, loose);
    const auto b = compute_Q(spec, tight);
    CHECK(std::isfinite(a.q));
    CHECK(std::abs(a.q - b.q) <= std::max(a.error, 1e-12 * a.q));
}

TEST_CASE("scalar inequalities") {
    const auto p = log_power_inequality(0.25, 3.0);
    CHECK(p.lhs == Approx(std::log(4.0)));
    CHECK(p.rhs == Approx(4.0 * std::pow(3.0, 0.25)));
    CHECK(p.holds());
    CHECK(log_power_inequality(0.5, 0.0).margin() == 0.0);
    CHECK(log_quadratic_inequality(0.0).margin() == 0.0);
    const auto q = log_quadratic_inequality(-0.5);
    CHECK(q.lhs == Approx(-0.69314718).epsilon(1e-8));
    CHECK(q.rhs == Approx(-0.625));
    CHECK(q.holds());
    CHECK(sinh_chord_inequality(std::log(2.0)).margin() == Approx(0.0).epsilon(1e-15));
    for (int i = 1; i <= 100; ++i) {
        CHECK(sinh_chord_inequality(std::log(2.0) * i / 100.0).holds(1e-15));
    }
    CHECK_THROWS_AS(log_power_inequality(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(log_quadratic_inequality(0.5), DomainError);
    CHECK_THROWS_AS(sinh_chord_inequality(1.0), DomainError);
}

TEST_CASE("bracket lower bounds hold on dense samples") {
    for (double a : {0.01, 0.1, 0.4, 0.66}) {
        for (int i = 1; i <= 400; ++i) {
            const double sigma = a + (1.0 - a) * i / 400.0;
            CHECK(bracket_quadratic_bound(a, sigma).holds(1e-15));
            if (sigma >= std::exp(2.0) * a) {
                CHECK(bracket_log_bound(a, sigma).holds(1e-15));
            }
        }
    }
    CHECK_THROWS_AS(bracket_log_bound(0.1, 0.2), DomainError);
}
