#include "logdiff/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace logdiff {

namespace {

std::string fmt(double x) {
    return format_double(x);
}

double max_relative_error(const ConformalState& state, ModelKind kind) {
    double e = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double exact = model_factor(kind, state.grid()[i], state.time());
        e = std::max(e, std::abs(state[i] - exact) / exact);
    }
    return e;
}

double max_abs_difference(const ConformalState& a, const ConformalState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

double sup_on_disc(const ConformalState& a, const ConformalState& b, double s0) {
    const auto s = a.grid().nodes();
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= s0) {
            d = std::max(d, std::abs(a[i] - b[i]));
        }
    }
    return d;
}

}  // namespace

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void ExperimentOutput::fail(std::string why) {
    passed = false;
    failures.push_back(std::move(why));
}

const CsvTable& ExperimentOutput::table(const std::string& name) const {
    for (const auto& [n, t] : tables) {
        if (n == name) {
            return t;
        }
    }
    throw std::out_of_range("no table named " + name);
}

void write_outputs(const std::filesystem::path& dir, const ExperimentOutput& output, const std::string& config_hash) {
    for (const auto& [name, table] : output.tables) {
        write_csv_file(dir / (name + ".csv"), table, config_hash);
    }
}

GridPtr exhaustion_grid(const ExperimentConfig& config, double r0, double R) {
    const double s0 = s_from_r(r0);
    const double S = s_from_r(R);
    return make_grid(LogPolarGrid::graded(config.s_min_fraction * S, std::max(config.s_max, 4.0 * s0),
                                          config.points, config.ratio));
}

std::pair<double, double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw SizeError("fit_power_law: need at least two matching points");
    }
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

// ---------------------------------------------------------------------------
// Exact solutions

ExactSuiteResult run_exact_solution_suite(const ExperimentConfig& config, unsigned jobs) {
    ExactSuiteResult result;
    const ModelKind kinds[] = {ModelKind::BigBang, ModelKind::Cusp};
    const auto& points = config.exact_points;
    const auto& dts = config.exact_dts;

    std::vector<GridPtr> grids;
    for (auto n : points) {
        grids.push_back(make_grid(LogPolarGrid::uniform(config.exact_s_min, config.exact_s_max, n)));
    }

    // Runs: spatial (kind, grid), temporal (kind, dt) and flat (grid).
    struct Run {
        std::string study;
        std::optional<ModelKind> kind;
        std::size_t grid;
        double dt;
        std::optional<ConformalState> final_state;
        std::string error;
    };
    std::vector<Run> runs;
    for (auto kind : kinds) {
        for (std::size_t g = 0; g < grids.size(); ++g) {
            runs.push_back({"space", kind, g, config.exact_fine_dt, std::nullopt, {}});
        }
        for (double dt : dts) {
            runs.push_back({"time", kind, 0, dt, std::nullopt, {}});
        }
    }
    for (std::size_t g = 0; g < grids.size(); ++g) {
        runs.push_back({"static", std::nullopt, g, dts.front(), std::nullopt, {}});
    }

    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        Run& run = runs[i];
        const GridPtr& grid = grids[run.grid];
        SolverConfig sc;
        sc.dt = run.dt;
        sc.dt_max = run.dt;
        sc.newton_tol = config.newton_tol;
        try {
            if (run.kind) {
                const auto initial = sample_model(*run.kind, grid, config.exact_t0);
                run.final_state = evolve(initial, BoundarySchedule::exact(*run.kind, *grid), sc, config.exact_T)
                                      .states()
                                      .back();
            } else {
                const auto initial = sample_model(ModelKind::FlatDisc, grid, 0.0);
                const auto schedule = BoundarySchedule::fixed(initial.values().front(), initial.values().back());
                run.final_state = evolve(initial, schedule, sc, config.exact_T).states().back();
            }
        } catch (const std::exception& e) {
            run.error = e.what();
        }
    });

    CsvTable table;
    table.header = {"model", "study", "points", "dt", "error", "order"};
    auto add = [&](const std::string& model, const std::string& study, std::size_t n, double dt, double error,
                   const std::string& order) {
        table.add_row({model, study, std::to_string(n), fmt(dt), fmt(error), order});
    };

    std::size_t r = 0;
    for (auto kind : kinds) {
        const std::string name = to_string(kind);
        // spatial
        std::vector<double> h, err;
        std::vector<std::size_t> space_rows;
        bool ok = true;
        for (std::size_t g = 0; g < grids.size(); ++g, ++r) {
            if (!runs[r].final_state) {
                result.fail(name + " space run failed: " + runs[r].error);
                ok = false;
                continue;
            }
            h.push_back((config.exact_s_max - config.exact_s_min) / static_cast<double>(points[g] - 1));
            err.push_back(max_relative_error(*runs[r].final_state, kind));
        }
        double space_order = std::numeric_limits<double>::quiet_NaN();
        if (ok) {
            space_order = fit_power_law(h, err).first;
        }
        for (std::size_t g = 0; g < err.size(); ++g) {
            add(name, "space", points[g], config.exact_fine_dt, err[g], fmt(space_order));
        }
        // temporal: self-differences between successive dt
        std::vector<ConformalState> states;
        ok = true;
        for (std::size_t d = 0; d < dts.size(); ++d, ++r) {
            if (!runs[r].final_state) {
                result.fail(name + " time run failed: " + runs[r].error);
                ok = false;
                continue;
            }
            states.push_back(*runs[r].final_state);
        }
        double time_order = std::numeric_limits<double>::quiet_NaN();
        if (ok) {
            std::vector<double> step, diff;
            for (std::size_t d = 0; d + 1 < states.size(); ++d) {
                step.push_back(dts[d]);
                diff.push_back(max_abs_difference(states[d], states[d + 1]));
            }
            time_order = fit_power_law(step, diff).first;
            for (std::size_t d = 0; d < diff.size(); ++d) {
                add(name, "time", points.front(), dts[d], diff[d], fmt(time_order));
            }
        }
        if (kind == ModelKind::BigBang) {
            result.bigbang_space_order = space_order;
            result.bigbang_time_order = time_order;
        } else {
            result.cusp_space_order = space_order;
            result.cusp_time_order = time_order;
        }
        if (!(std::abs(space_order - 2.0) <= 0.3)) {
            result.fail(name + " spatial order " + fmt(space_order) + " outside 2 +- 0.3");
        }
        if (!(std::abs(time_order - 1.0) <= 0.2)) {
            result.fail(name + " temporal order " + fmt(time_order) + " outside 1 +- 0.2");
        }
    }
    for (std::size_t g = 0; g < grids.size(); ++g, ++r) {
        if (!runs[r].final_state) {
            result.fail("flat run failed: " + runs[r].error);
            continue;
        }
        const auto initial = sample_model(ModelKind::FlatDisc, grids[g], 0.0);
        const double residual = max_abs_difference(*runs[r].final_state, initial);
        result.flat_residual = std::max(result.flat_residual, residual);
        add("flat", "static", points[g], dts.front(), residual, "");
    }
    if (!(result.flat_residual <= config.newton_tol)) {
        result.fail("flat disc drifted by " + fmt(result.flat_residual));
    }

    CsvTable mms;
    mms.header = {"model", "points", "dt", "residual"};
    for (auto kind : {ModelKind::BigBang, ModelKind::Cusp, ModelKind::FlatDisc}) {
        for (std::size_t g = 0; g < grids.size(); ++g) {
            SolverConfig sc;
            sc.newton_tol = config.newton_tol;
            const double t = kind == ModelKind::FlatDisc ? 0.0 : config.exact_t0;
            mms.add_row({to_string(kind), std::to_string(points[g]), fmt(config.exact_fine_dt),
                         fmt(mms_residual(kind, grids[g], t, config.exact_fine_dt, sc))});
        }
    }
    result.tables.emplace_back("exact_suite", std::move(table));
    result.tables.emplace_back("exact_mms", std::move(mms));
    return result;
}

// ---------------------------------------------------------------------------
// Uniqueness

UniquenessResult run_uniqueness_experiment(const ExperimentConfig& config, unsigned jobs) {
    UniquenessResult result;
    if (config.k.size() < 2) {
        throw ConfigError({"uniqueness: ramps.k needs at least two values"});
    }
    struct Point {
        double r0;
        double R;
        std::optional<ExhaustionResult> flows;
        std::string error;
    };
    std::vector<Point> points;
    for (double r0 : config.r0) {
        for (double R : config.radii(r0)) {
            points.push_back({r0, R, std::nullopt, {}});
        }
    }
    if (points.empty()) {
        throw ConfigError({"uniqueness: no radii (set cutoff.R or cutoff.R_fraction)"});
    }
    const SolverConfig solver = config.solver();
    parallel_for(points.size(), jobs, [&](std::size_t i) {
        Point& p = points[i];
        try {
            const GridPtr grid = exhaustion_grid(config, p.r0, p.R);
            p.flows = exhaust(sample_model(ModelKind::FlatDisc, grid, 0.0), config.k, solver, config.T, p.r0, 1);
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    });

    CsvTable barriers;
    barriers.header = {"r0", "R", "k", "barrier_margin", "u_inverse_margin", "monotone_in_k"};
    CsvTable table;
    table.header = {"r0", "R", "gamma", "k_lo", "k_hi", "t", "sup_diff", "area_diff",
                    "envelope", "cert_lhs", "cert_rhs", "cert_margin"};

    // (r0, pair, sample index) -> area differences in increasing R
    std::map<std::tuple<double, std::size_t, std::size_t, std::size_t>, std::vector<std::pair<double, double>>> by_R;

    for (const auto& p : points) {
        if (!p.flows) {
            result.fail("run r0=" + fmt(p.r0) + " R=" + fmt(p.R) + " failed: " + p.error);
            continue;
        }
        const auto& flows = p.flows->trajectories;
        const double s0 = s_from_r(p.r0);
        if (!p.flows->diagnostics.monotone) {
            result.fail("ordering in k violated at r0=" + fmt(p.r0) + " R=" + fmt(p.R));
        }
        for (std::size_t j = 0; j < flows.size(); ++j) {
            const auto barrier = lower_barrier_check(flows[j]);
            double u_inverse = std::numeric_limits<double>::infinity();
            bool ok = barrier.passed(1e-8);
            for (const auto& st : flows[j].states()) {
                if (st.time() > 0.0) {
                    const auto b = pointwise_u_inverse_bound(flows[j], st.time());
                    ok = ok && b.passed();
                    u_inverse = std::min(u_inverse, b.min_margin());
                }
            }
            if (!ok) {
                result.barrier_ok = false;
                result.fail("barrier or 1/U bound fails for k=" + fmt(config.k[j]) + " r0=" + fmt(p.r0) +
                            " R=" + fmt(p.R));
            }
            barriers.add_row({fmt(p.r0), fmt(p.R), fmt(config.k[j]), fmt(barrier.min_margin()), fmt(u_inverse),
                              p.flows->diagnostics.monotone ? "1" : "0"});
        }
        for (std::size_t a = 0; a < flows.size(); ++a) {
            for (std::size_t b = a + 1; b < flows.size(); ++b) {
                std::vector<EstimateReport> certs;
                for (double gamma : config.gamma) {
                    try {
                        certs.push_back(interior_area_verify(flows[a], flows[b], p.r0, p.R, gamma));
                    } catch (const std::exception& e) {
                        result.certificates_ok = false;
                        result.fail(std::string("interior area certificate refused: ") + e.what());
                        certs.emplace_back();
                    }
                }
                for (std::size_t k = 0; k < flows[a].size(); ++k) {
                    const double t = flows[a][k].time();
                    const double sup = sup_on_disc(flows[a][k], flows[b][k], s0);
                    const double area = area_difference(flows[a][k], flows[b][k], p.r0, false);
                    if (k > 0) {
                        by_R[{p.r0, a, b, k}].push_back({p.R, area});
                    }
                    for (std::size_t g = 0; g < config.gamma.size(); ++g) {
                        const double gamma = config.gamma[g];
                        const double envelope = area_envelope(gamma, p.r0, p.R, t);
                        double lhs = 0.0, rhs = 0.0;
                        if (k < certs[g].rows.size()) {
                            lhs = certs[g].rows[k].lhs;
                            rhs = certs[g].rows[k].rhs;
                            if (!(rhs - lhs >= 0.0)) {
                                result.certificates_ok = false;
                                result.fail("interior area certificate fails at r0=" + fmt(p.r0) + " R=" + fmt(p.R) +
                                            " gamma=" + fmt(gamma) + " t=" + fmt(t));
                            }
                        }
                        if (!(area <= envelope)) {
                            result.below_envelope = false;
                            result.fail("area difference above the envelope at r0=" + fmt(p.r0) + " R=" + fmt(p.R) +
                                        " t=" + fmt(t));
                        }
                        table.add_row({fmt(p.r0), fmt(p.R), fmt(gamma), fmt(config.k[a]), fmt(config.k[b]), fmt(t),
                                       fmt(sup), fmt(area), fmt(envelope), fmt(lhs), fmt(rhs), fmt(rhs - lhs)});
                    }
                }
            }
        }
    }
    for (auto& [key, series] : by_R) {
        std::sort(series.begin(), series.end());
        for (std::size_t i = 1; i < series.size(); ++i) {
            if (series[i].second > series[i - 1].second * (1.0 + 1e-9) + 1e-15) {
                result.monotone_in_R = false;
                result.fail("area difference grows from R=" + fmt(series[i - 1].first) + " to R=" +
                            fmt(series[i].first) + " (r0=" + fmt(std::get<0>(key)) + ")");
            }
        }
    }

    CsvTable demo;
    demo.header = {"r0", "R", "k_a", "k_b", "t", "sup_difference", "refinement_error", "ratio", "passed"};
    for (double r0 : config.r0) {
        try {
            const auto d = uniqueness_demonstration(config, r0, jobs);
            demo.add_row({fmt(r0), fmt(config.radii(r0).back()), fmt(config.k[config.k.size() - 2]),
                          fmt(config.k.back()), fmt(config.T), fmt(d.sup_difference), fmt(d.refinement_error),
                          fmt(d.sup_difference / d.refinement_error), d.passed ? "1" : "0"});
            if (!d.passed) {
                result.fail("ramp difference exceeds 10x the refinement error at r0=" + fmt(r0));
            }
        } catch (const std::exception& e) {
            result.fail(std::string("demonstration failed: ") + e.what());
        }
    }

    result.tables.emplace_back("uniqueness", std::move(table));
    result.tables.emplace_back("uniqueness_barriers", std::move(barriers));
    result.tables.emplace_back("uniqueness_demo", std::move(demo));
    result.tables.emplace_back("constants", constants_csv(constants_table(config.gamma)));
    return result;
}

DemonstrationResult uniqueness_demonstration(const ExperimentConfig& config, double r0, unsigned jobs) {
    if (config.k.size() < 2) {
        throw ConfigError({"uniqueness: ramps.k needs at least two values"});
    }
    const auto radii = config.radii(r0);
    if (radii.empty()) {
        throw ConfigError({"uniqueness: no radii"});
    }
    const GridPtr grid = exhaustion_grid(config, r0, radii.back());
    const GridPtr fine = make_grid(grid->refined());
    SolverConfig coarse_cfg = config.solver();
    coarse_cfg.sample_times.clear();
    SolverConfig fine_cfg = coarse_cfg;
    fine_cfg.dt *= 0.5;
    fine_cfg.dt_max *= 0.5;

    const double k_a = config.k[config.k.size() - 2];
    const double k_b = config.k.back();
    std::optional<ConformalState> a, b, bf;
    parallel_for(3, jobs, [&](std::size_t i) {
        const GridPtr& g = i == 2 ? fine : grid;
        const auto initial = sample_model(ModelKind::FlatDisc, g, 0.0);
        const auto schedule = BoundarySchedule::ramp(initial, i == 0 ? k_a : k_b);
        auto final_state = evolve(initial, schedule, i == 2 ? fine_cfg : coarse_cfg, config.T).states().back();
        (i == 0 ? a : i == 1 ? b : bf).emplace(std::move(final_state));
    });

    const double s0 = s_from_r(r0);
    DemonstrationResult d;
    d.sup_difference = sup_on_disc(*a, *b, s0);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        if ((*grid)[i] >= s0) {
            d.refinement_error = std::max(d.refinement_error, std::abs((*b)[i] - (*bf)[2 * i]));
        }
    }
    d.passed = d.sup_difference < 10.0 * d.refinement_error;
    return d;
}

// ---------------------------------------------------------------------------
// Q sweep

QSweepResult run_q_sweep(const ExperimentConfig& config, unsigned jobs) {
    struct Row {
        CutoffSpec spec;
        QReport report;
        double bound = 0.0;
        std::string status = "ok";
    };
    std::vector<Row> rows;
    for (double r0 : config.r0) {
        for (double R : config.radii(r0)) {
            for (double gamma : config.gamma) {
                rows.push_back({CutoffSpec::make(r0, R, gamma), {}, 0.0, "ok"});
            }
        }
    }
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        Row& row = rows[i];
        row.bound = q_analytic_bound(row.spec).bound;
        try {
            row.report = compute_Q(row.spec);
        } catch (const QuadratureFailure& e) {
            row.report = e.partial();
            row.status = "quadrature_failure";
        }
    });

    QSweepResult result;
    CsvTable table;
    table.header = {"r0", "R", "gamma", "s0", "S", "a", "split", "Q", "Q1", "Q2",
                    "error", "bound", "ratio", "split_gap", "status"};
    for (const auto& row : rows) {
        const auto& q = row.report;
        const double gap = row.spec.a * std::exp(2.0) < 1.0 ? std::abs(q.q - (q.q1 + q.q2)) : 0.0;
        const double allowed = q.error + q.error1 + q.error2 + 64.0 * std::numeric_limits<double>::epsilon() * q.q;
        const double ratio = q.q / row.bound;
        std::string status = row.status;
        if (status == "ok" && !(ratio <= 1.0)) {
            status = "bound_violation";
            ++result.bound_violations;
        } else if (status == "ok" && gap > allowed) {
            status = "split_violation";
            ++result.split_violations;
        } else if (status != "ok") {
            ++result.quadrature_failures;
        }
        if (status != "ok") {
            result.fail(status + " at r0=" + fmt(row.spec.r0) + " R=" + fmt(row.spec.R) + " gamma=" + fmt(row.spec.gamma));
        }
        table.add_row({fmt(row.spec.r0), fmt(row.spec.R), fmt(row.spec.gamma), fmt(row.spec.s0), fmt(row.spec.S),
                       fmt(row.spec.a), q.split ? "1" : "0", fmt(q.q), fmt(q.q1), fmt(q.q2), fmt(q.error),
                       fmt(row.bound), fmt(ratio), fmt(gap), status});
    }
    result.rows = rows.size();
    result.tables.emplace_back("q_sweep", std::move(table));
    result.tables.emplace_back("constants", constants_csv(constants_table(config.gamma)));
    return result;
}

// ---------------------------------------------------------------------------
// Boundary layer

BoundaryLayerResult run_boundary_layer_experiment(const ExperimentConfig& config) {
    BoundaryLayerResult result;
    const GridPtr grid = make_grid(LogPolarGrid::graded(config.layer_s_min, config.s_max, config.layer_points, config.ratio));
    SolverConfig sc = config.solver();
    sc.sample_times = config.layer_times;
    const auto initial = sample_model(ModelKind::FlatDisc, grid, 0.0);
    const Trajectory flow =
        evolve(initial, BoundarySchedule::ramp(initial, config.layer_k), sc, config.layer_times.back());

    CsvTable table;
    table.header = {"t", "s_star", "width"};
    const auto s = grid->nodes();
    std::vector<double> fit_t, fit_w;
    for (const auto& state : flow.states()) {
        if (state.time() <= 0.0) {
            continue;
        }
        double s_star = s.front();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double ratio = state[i] / std::exp(-2.0 * s[i]);
            if (ratio >= 2.0 || ratio <= 0.5) {
                s_star = s[i];
            }
        }
        const double width = s_star - s.front();
        if (!result.widths.empty() && width < result.widths.back()) {
            result.monotone = false;
        }
        result.times.push_back(state.time());
        result.widths.push_back(width);
        if (width > 0.0) {
            fit_t.push_back(state.time());
            fit_w.push_back(width);
        }
        table.add_row({fmt(state.time()), fmt(s_star), fmt(width)});
    }
    CsvTable fit;
    fit.header = {"exponent", "prefactor", "points", "in_range"};
    if (fit_t.size() >= 2) {
        const auto [p, log_c] = fit_power_law(fit_t, fit_w);
        result.exponent = p;
        result.prefactor = std::exp(log_c);
    } else {
        result.exponent = std::numeric_limits<double>::quiet_NaN();
    }
    const bool in_range = result.exponent >= 0.35 && result.exponent <= 0.65;
    fit.add_row({fmt(result.exponent), fmt(result.prefactor), std::to_string(fit_t.size()), in_range ? "1" : "0"});
    result.tables.emplace_back("boundary_layer", std::move(table));
    result.tables.emplace_back("boundary_layer_fit", std::move(fit));
    return result;
}

}  // namespace logdiff
