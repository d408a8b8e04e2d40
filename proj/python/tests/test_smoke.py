import math

import pytest

import logdiff as ld


def test_coordinates_round_trip():
    assert ld.s_from_r(0.5) == pytest.approx(math.log(2.0), rel=1e-15)
    assert ld.s_from_r(ld.r_from_s(0.37)) == pytest.approx(0.37, abs=1e-14)
    with pytest.raises(ValueError):
        ld.s_from_r(1.5)


def test_hyperbolic_factor_at_log2():
    assert ld.hyperbolic_factor(math.log(2.0)) == pytest.approx(16.0 / 9.0, rel=1e-14)
    assert ld.model_factor(ld.ModelKind.BigBang, math.log(2.0), 1.0) == pytest.approx(32.0 / 9.0, rel=1e-14)


def test_flat_disc_area():
    grid = ld.LogPolarGrid.graded(0.01, 12.0, 2000, 1.002)
    state = ld.sample_model(ld.ModelKind.FlatDisc, grid, 0.0)
    assert ld.disc_area(state, 0.8) == pytest.approx(0.64 * math.pi, abs=1e-5)


def test_flux_function_values():
    f = ld.FluxFunction(math.exp(-2.0))
    assert f.value(math.exp(-2.0)) == 0.0
    assert f.value(1.0) == pytest.approx(1.0 - (1.0 - math.exp(-2.0)) / 2.0, rel=1e-14)
    assert f.value(3.0) == 1.0


def test_q_regression_value():
    spec = ld.CutoffSpec.make(math.exp(-0.5), math.exp(-0.1), 0.25)
    report = ld.compute_Q(spec)
    assert not report.split
    assert report.q == pytest.approx(10.1857454797627521, rel=1e-10)
    assert report.q <= ld.q_analytic_bound(spec)


def test_flat_disc_is_a_fixed_point():
    grid = ld.LogPolarGrid.uniform(0.1, 4.0, 60)
    state = ld.sample_model(ld.ModelKind.FlatDisc, grid, 0.0)
    values = state.values
    schedule = ld.BoundarySchedule.fixed(values[0], values[-1])
    config = ld.SolverConfig()
    config.dt = 0.05
    config.dt_max = 0.05
    flow = ld.evolve(state, schedule, config, 1.0)
    assert max(abs(a - b) for a, b in zip(flow.states[-1].values, values)) <= 1e-10


def test_exhaustion_pair_certificates():
    r0, R = 0.75, 0.99
    grid = ld.LogPolarGrid.graded(-math.log(R) / 4, 8.0, 300, 1.025)
    initial = ld.sample_model(ld.ModelKind.FlatDisc, grid, 0.0)
    config = ld.SolverConfig()
    config.dt = 1e-6
    config.dt_max = 1e-3
    config.dt_growth = 1.05
    config.sample_times = [0.025, 0.05]
    result = ld.exhaust(initial, [100.0, 1000.0], config, 0.1, r0, 2)
    assert result.diagnostics.monotone
    g, G = result.trajectories
    assert ld.lower_barrier_check(g).passed(1e-8)
    assert ld.interior_area_verify(g, G, r0, R, 0.25).passed()
    spec = ld.CutoffSpec.make(r0, R, 0.25)
    assert ld.compute_J(g, G, spec, 0.05) >= 0.0


def test_config_rejects_small_r0():
    with pytest.raises(ValueError, match=r"r0 in \(1/2, 1\)"):
        ld.parse_config_text("[cutoff]\nr0 = 0.4\n")


def test_config_round_trip():
    config = ld.parse_config_text("[cutoff]\nr0 = 0.7\nR = 0.95\n")
    assert ld.parse_config_text(ld.write_config(config)) == config
