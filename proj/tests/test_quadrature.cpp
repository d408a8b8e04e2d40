#include "logdiff/errors.hpp"
#include "logdiff/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace logdiff;
using doctest::Approx;

TEST_CASE("gauss_kronrod integrates smooth functions to round-off") {
    const auto r = quadrature::gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    const auto s = quadrature::gauss_kronrod([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(s.value == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gauss_kronrod tolerates integrable endpoint singularities") {
    quadrature::Options opts;
    opts.rel_tol = 1e-8;
    const auto r = quadrature::gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opts);
    CHECK(r.value == Approx(2.0).epsilon(1e-7));
}

TEST_CASE("gauss_kronrod reports a spent budget") {
    quadrature::Options opts;
    opts.max_intervals = 3;
    const auto r = quadrature::gauss_kronrod([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, opts);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(quadrature::gauss_kronrod([](double) { return 1.0; }, 0.0, INFINITY), DomainError);
}

TEST_CASE("trapezoid with partial cells") {
    const std::vector<double> x{0.0, 1.0, 2.0, 4.0};
    const std::vector<double> y{0.0, 1.0, 2.0, 4.0};
    // y = x is integrated exactly, including partial cells.
    CHECK(quadrature::trapezoid(x, y, 0.0, 4.0) == Approx(8.0));
    CHECK(quadrature::trapezoid(x, y, 0.5, 3.0) == Approx(4.375));
    CHECK(quadrature::trapezoid(x, y, 1.5, 1.5) == 0.0);
    CHECK(quadrature::interpolate(x, y, 3.0) == Approx(3.0));
    CHECK_THROWS_AS(quadrature::trapezoid(x, y, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(quadrature::interpolate(std::vector<double>{1.0}, std::vector<double>{1.0}, 1.0), SizeError);
}
