#include "logdiff/conformal.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace logdiff;
using doctest::Approx;

TEST_CASE("radius and log-polar coordinate round-trip") {
    CHECK(s_from_r(std::exp(-0.5)) == Approx(0.5));
    CHECK(r_from_s(s_from_r(0.3)) == Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(s_from_r(1.0), DomainError);
    CHECK_THROWS_AS(s_from_r(0.0), DomainError);
    CHECK_THROWS_AS(r_from_s(0.0), DomainError);
    CHECK(hyperbolic_factor(1.0) == Approx(1.0 / std::pow(std::sinh(1.0), 2)));
}

TEST_CASE("graded grids and refinement") {
    const auto g = LogPolarGrid::graded(0.1, 3.0, 41, 1.04);
    CHECK(g.s_min() == 0.1);
    CHECK(g.s_max() == 3.0);
    CHECK((g[2] - g[1]) / (g[1] - g[0]) == Approx(1.04));
    const auto f = g.refined();
    CHECK(f.size() == 81);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(f[2 * i] == g[i]);
    }
    CHECK(*f.grading() == Approx(std::sqrt(1.04)));
    const auto u = LogPolarGrid::uniform(1.0, 2.0, 5).refined();
    CHECK(u[1] == Approx(1.125));
    CHECK_THROWS_AS(LogPolarGrid::graded(0.1, 3.0, 2), SizeError);
    CHECK_THROWS_AS(LogPolarGrid({0.1, 0.3, 0.2}), DomainError);
    CHECK_THROWS_AS(LogPolarGrid::graded(0.0, 1.0, 10), DomainError);
}

TEST_CASE("states reject non-positive data") {
    auto grid = make_grid(LogPolarGrid::uniform(0.1, 1.0, 4));
    CHECK_THROWS_AS(ConformalState(grid, {1.0, 1.0, 0.0, 1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(ConformalState(grid, {1.0, 1.0, 1.0}, 0.0), SizeError);
    CHECK_THROWS_AS(ConformalState(grid, {1.0, 1.0, 1.0, 1.0}, -1.0), DomainError);
}

TEST_CASE("model factors") {
    CHECK(model_factor(ModelKind::BigBang, 1.0, 0.5) == Approx(hyperbolic_factor(1.0)));
    CHECK(model_factor(ModelKind::Cusp, 2.0, 1.0) == Approx(0.5));
    CHECK(model_factor(ModelKind::FlatDisc, 0.0, 3.0) == 1.0);
    CHECK(model_factor(ModelKind::Poincare, 1.0, 7.0) == Approx(hyperbolic_factor(1.0)));
    CHECK(model_kind_from_string("cusp") == ModelKind::Cusp);
    CHECK_THROWS_AS(model_kind_from_string("sphere"), DomainError);
    CHECK_FALSE(is_time_dependent(ModelKind::FlatDisc));
}

TEST_CASE("discrete curvature of the model metrics") {
    auto grid = make_grid(LogPolarGrid::graded(0.05, 6.0, 2001, 1.001));
    for (double k : gauss_curvature(sample_model(ModelKind::Poincare, grid, 0.0))) {
        CHECK(k == Approx(-1.0).epsilon(1e-4));
    }
    for (double k : gauss_curvature(sample_model(ModelKind::FlatDisc, grid, 0.0))) {
        CHECK(std::abs(k) < 1e-9);
    }
    // BigBang at time t has K = -1/(2t)
    for (double k : gauss_curvature(sample_model(ModelKind::BigBang, grid, 0.25))) {
        CHECK(k == Approx(-2.0).epsilon(1e-3));
    }
}

TEST_CASE("areas against closed forms") {
    auto grid = make_grid(LogPolarGrid::graded(s_from_r(0.8), 8.0, 8001, 1.0005));
    // oracle: 4 pi t (coth s(0.8) - 1) at t = 1
    CHECK(disc_area(sample_model(ModelKind::BigBang, grid, 1.0), 0.8) ==
          Approx(44.6804288510548509).epsilon(1e-6));
    // flat disc of radius r has area pi r^2
    const auto flat = sample_model(ModelKind::FlatDisc, grid, 0.0);
    CHECK(disc_area(flat, 0.8) == Approx(std::numbers::pi * 0.64).epsilon(1e-6));
    CHECK(centre_tail_area(flat) == Approx(std::numbers::pi * std::exp(-16.0)));
    CHECK_THROWS_AS(disc_area(flat, 0.9), DomainError);
}

TEST_CASE("weighted area with the cut-off") {
    const auto spec = CutoffSpec::make(0.75, 0.99, 0.25);
    auto grid = make_grid(LogPolarGrid::graded(spec.S, 8.0, 20001, 1.0002));
    const auto bb = sample_model(ModelKind::BigBang, grid, 1.0);
    // oracle: 2 pi int phi 2tH plus the tail
    CHECK(weighted_area(bb, spec) == Approx(128.963614474575709).epsilon(1e-6));
    const auto no_tail = weighted_integral(bb.grid(), bb.values(), [](double) { return 1.0; }, 8.0, false);
    CHECK(no_tail == 0.0);
    auto coarse = make_grid(LogPolarGrid::graded(spec.S, 8.0, 30, 1.2));
    CHECK_THROWS_AS(weighted_area(sample_model(ModelKind::BigBang, coarse, 1.0), spec), ResolutionError);
    auto narrow = make_grid(LogPolarGrid::graded(spec.S, 0.2, 100, 1.0));
    CHECK_THROWS_AS(weighted_area(sample_model(ModelKind::BigBang, narrow, 1.0), spec), DomainError);
}
