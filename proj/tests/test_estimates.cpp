#include "logdiff/estimates.hpp"

#include <doctest.h>

#include <cmath>

using namespace logdiff;
using doctest::Approx;

namespace {

const std::vector<double> kTimes{0.9, 0.95, 1.0, 1.05, 1.1};

struct Pair {
    Trajectory bb;
    Trajectory cusp;
};

Pair model_pair(double s_min, double s_max, std::size_t n) {
    auto grid = make_grid(LogPolarGrid::uniform(s_min, s_max, n));
    return {model_trajectory(ModelKind::BigBang, grid, kTimes), model_trajectory(ModelKind::Cusp, grid, kTimes)};
}

}  // namespace

TEST_CASE("tracked constants match the mpmath oracle") {
    CHECK(barrier_constant() == Approx(0.585385025907827193).epsilon(1e-15));
    CHECK(odi_constant(0.1) == Approx(55.7017802222710542).epsilon(1e-13));
    CHECK(odi_constant(0.25) == Approx(19.5434944960153346).epsilon(1e-13));
    CHECK(odi_constant(0.4) == Approx(11.162237715420048).epsilon(1e-13));
    CHECK(area_estimate_constant(0.1) == Approx(1441.96501813288241).epsilon(1e-11));
    CHECK(area_estimate_constant(0.25) == Approx(396.144332346912086).epsilon(1e-11));
    CHECK(area_estimate_constant(0.4) == Approx(228.433519745347674).epsilon(1e-11));
    CHECK(envelope_constant(0.1, 0.75) == Approx(11190.7241843366923).epsilon(1e-11));
    CHECK(envelope_constant(0.25, 0.75) == Approx(7425.16303150661322).epsilon(1e-11));
    CHECK(envelope_constant(0.4, 0.75) == Approx(9441.35091253644329).epsilon(1e-11));
    CHECK(area_envelope(0.25, 0.75, 0.99, 2.0) ==
          Approx(2.0 * 7425.16303150661322 / std::pow(-std::log(-std::log(0.99)), 0.25)));
    const auto table = constants_csv(constants_table({0.1, 0.25}));
    CHECK(table.rows.size() == 2);
    CHECK(table.header.front() == "gamma");
    CHECK(table.header.back() == "area_estimate");
}

TEST_CASE("reports") {
    EstimateReport r;
    CHECK(r.passed());
    r.rows.push_back({0.1, "a", 1.0, 2.0, ""});
    r.rows.push_back({0.2, "b", 2.0, 1.99, ""});
    CHECK(r.min_margin() == Approx(-0.01));
    CHECK_FALSE(r.passed());
    CHECK(r.passed(0.02));
    EstimateReport pre;
    pre.precondition_ok = false;
    r.append(pre);
    CHECK_FALSE(r.passed(1.0));
    const auto csv = estimate_csv(r);
    CHECK(csv.header == std::vector<std::string>{"time", "id", "lhs", "rhs", "margin", "constants"});
    CHECK(csv.rows.size() == 2);
}

TEST_CASE("J and its time derivative on the model pair") {
    const auto spec = CutoffSpec::make(0.75, 0.99, 0.25);
    auto p = model_pair(spec.S, 8.0, 16001);
    // oracle: J = t * 4 pi int_S^8 (1/s^2 - 1/sinh^2 s) phi
    CHECK(compute_J(p.bb, p.cusp, spec, 1.0) == Approx(10.485774969142121).epsilon(1e-6));
    CHECK(compute_J(p.bb, p.cusp, spec, 1.0, JVariant::PositivePart) ==
          Approx(compute_J(p.bb, p.cusp, spec, 1.0)));
    CHECK(compute_J(p.bb, p.bb, spec, 1.0) == 0.0);
    CHECK_THROWS_AS(compute_J(p.bb, p.cusp, spec, 0.5), DomainError);
    const auto check = djdt_identity_check(p.bb, p.cusp, spec, 1.0);
    CHECK(check.finite_difference == Approx(10.485774969142121).epsilon(1e-6));
    CHECK(check.relative_discrepancy() < 1e-3);
}

TEST_CASE("lower barrier and pointwise inverse bound") {
    auto p = model_pair(0.05, 4.0, 400);
    const auto barrier = lower_barrier_check(p.cusp);
    CHECK(barrier.passed());
    CHECK(barrier.rows.size() == kTimes.size());
    CHECK(lower_barrier_check(p.bb).min_margin() == Approx(0.0).scale(1.0));
    const auto inv = pointwise_u_inverse_bound(p.bb, 1.0);
    CHECK(inv.precondition_ok);
    CHECK(inv.passed());
    auto grid = make_grid(LogPolarGrid::uniform(0.05, 4.0, 400));
    const auto flat = model_trajectory(ModelKind::FlatDisc, grid, {1.0});
    const auto bad = pointwise_u_inverse_bound(flat, 1.0);
    CHECK_FALSE(bad.precondition_ok);
    CHECK(bad.rows.empty());
    CHECK(min_log_gap(p.bb[0], p.cusp[0]) > 0.0);
    auto other = make_grid(LogPolarGrid::uniform(0.05, 4.0, 401));
    CHECK_THROWS_AS(min_log_gap(p.bb[0], sample_model(ModelKind::FlatDisc, other, 1.0)), IncompatibleError);
}

TEST_CASE("main ODI and area certificates on the model pair") {
    const auto spec = CutoffSpec::make(0.75, 0.99, 0.25);
    auto p = model_pair(spec.S, 8.0, 4001);
    const auto odi = main_odi_check(p.bb, p.cusp, spec);
    CHECK(odi.precondition_ok);
    CHECK(odi.passed());
    CHECK(odi.rows.size() == kTimes.size() - 1);
    CHECK_THROWS_AS(main_odi_check(p.cusp, p.bb, spec), IncompatibleError);

    const auto area = interior_area_verify(p.bb, p.cusp, 0.75, 0.99, 0.25);
    CHECK(area.passed());
    CHECK(volume_excess_verify(p.bb, p.cusp, 0.75, 0.99, 0.25).passed());
    CHECK(volume_excess_verify(p.cusp, p.bb, 0.75, 0.99, 0.25).passed());
    CHECK_THROWS_AS(interior_area_verify(p.bb, p.cusp, 0.75, 0.8, 0.25), DomainError);
    CHECK_THROWS_AS(interior_area_verify(p.cusp, p.bb, 0.75, 0.99, 0.25), IncompatibleError);

    const auto& u = p.bb.at(1.0);
    const auto& v = p.cusp.at(1.0);
    CHECK(area_difference(u, v, 0.75, false) == Approx(area_difference(u, v, 0.75, true)));
    CHECK(area_difference(v, u, 0.75, true) == 0.0);
    CHECK(area_difference(u, v, 0.75, false) > area_difference(u, v, 0.5, false));
}

TEST_CASE("proof-chain steps on discrete data") {
    const auto spec = CutoffSpec::make(0.75, 0.99, 0.25);
    auto p = model_pair(spec.S, 8.0, 4001);
    for (double g : {0.1, 0.25, 0.4}) {
        CHECK(log_ratio_inequality_margin(p.bb[2], p.cusp[2], g) >= 0.0);
    }
    const auto h = holder_step_check(p.bb[2], p.cusp[2], spec);
    CHECK(h.product > 0.0);
    CHECK(h.product <= h.bound);
}

TEST_CASE("curvature monotonicity needs K >= -1") {
    auto grid = make_grid(LogPolarGrid::uniform(0.2, 4.0, 2001));
    CHECK(curvature_monotonicity_check(model_trajectory(ModelKind::FlatDisc, grid, {0.0, 0.5, 1.0})).passed());
    // BigBang has K = -1/(2t)
    const auto late = curvature_monotonicity_check(model_trajectory(ModelKind::BigBang, grid, {0.5, 0.75, 1.0}));
    CHECK(late.precondition_ok);
    CHECK(late.passed(1e-12));
    const auto early = curvature_monotonicity_check(model_trajectory(ModelKind::BigBang, grid, {0.25, 0.5}));
    CHECK_FALSE(early.precondition_ok);
    CHECK_FALSE(early.passed());
}
