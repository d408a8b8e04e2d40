#include "logdiff/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace logdiff {

namespace {

// Largest accepted change of log U in one Newton update.
constexpr double kMaxLogJump = 40.0;

void require_positive_value(double value, const char* side, double t) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "boundary schedule: " << side << " value " << value << " at t = " << t
            << " is not positive and finite";
        throw DomainError(msg.str());
    }
}

// Solves a tridiagonal system in place; lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

bool same_time(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundarySchedule

BoundarySchedule::BoundarySchedule(ValueFn inner, ValueFn outer, std::string label)
    : inner_(std::move(inner)), outer_(std::move(outer)), label_(std::move(label)) {
    if (!inner_ || !outer_) {
        throw std::invalid_argument("BoundarySchedule: empty value function");
    }
}

BoundarySchedule BoundarySchedule::fixed(double inner, double outer) {
    require_positive_value(inner, "inner", 0.0);
    require_positive_value(outer, "outer", 0.0);
    return BoundarySchedule([inner](double) { return inner; }, [outer](double) { return outer; },
                            "fixed");
}

BoundarySchedule BoundarySchedule::exact(ModelKind kind, const LogPolarGrid& grid) {
    const double s_min = grid.s_min();
    const double s_max = grid.s_max();
    return BoundarySchedule([kind, s_min](double t) { return model_factor(kind, s_min, t); },
                            [kind, s_max](double t) { return model_factor(kind, s_max, t); },
                            "exact-" + to_string(kind));
}

double ramp_slope(double k, double s_min) {
    return k * 2.0 * hyperbolic_factor(s_min);
}

BoundarySchedule BoundarySchedule::ramp(const ConformalState& initial, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw DomainError("BoundarySchedule::ramp: k must be positive");
    }
    const double start = initial.values().front();
    const double centre = initial.values().back();
    const double slope = ramp_slope(k, initial.grid().s_min());
    std::ostringstream label;
    label << "ramp-k" << k;
    return BoundarySchedule([start, slope](double t) { return std::max(start, slope * t); },
                            [centre](double) { return centre; }, label.str());
}

BoundarySchedule BoundarySchedule::switched_ramp(const ConformalState& initial, double k_before,
                                                 double k_after, double t_switch) {
    if (!(k_before > 0.0) || !(k_after > 0.0)) {
        throw DomainError("BoundarySchedule::switched_ramp: ramps must be positive");
    }
    const double start = initial.values().front();
    const double centre = initial.values().back();
    const double s_min = initial.grid().s_min();
    const double before = ramp_slope(k_before, s_min);
    const double after = ramp_slope(k_after, s_min);
    std::ostringstream label;
    label << "ramp-k" << k_before << "-to-k" << k_after << "-at-" << t_switch;
    return BoundarySchedule(
        [=](double t) { return std::max(start, (t <= t_switch ? before : after) * t); },
        [centre](double) { return centre; }, label.str());
}

// ---------------------------------------------------------------------------
// SolverConfig

std::string SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        return "dt must be positive";
    }
    if (!(dt_max >= dt)) {
        return "dt_max must be >= dt";
    }
    if (!(dt_growth >= 1.0)) {
        return "dt_growth must be >= 1";
    }
    if (!(newton_tol > 0.0)) {
        return "newton_tol must be positive";
    }
    if (max_newton < 1 || max_damping < 0 || max_retries < 0) {
        return "iteration limits must be positive";
    }
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (!std::isfinite(sample_times[i]) || (i > 0 && !(sample_times[i] > sample_times[i - 1]))) {
            return "sample times must be finite and strictly increasing";
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// step

StepResult step(const ConformalState& state, double dt, const BoundarySchedule& schedule,
                const SolverConfig& config) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("step: dt must be positive");
    }
    const auto& grid = state.grid();
    const auto s = grid.nodes();
    const std::size_t n = state.size();
    const std::size_t m = n - 2;  // interior unknowns
    const double t_new = state.time() + dt;

    const double inner = schedule.inner(t_new);
    const double outer = schedule.outer(t_new);
    require_positive_value(inner, "inner", t_new);
    require_positive_value(outer, "outer", t_new);

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::log(state[i]);
    }
    w.front() = std::log(inner);
    w.back() = std::log(outer);

    // dt * D2 coefficients of w_{i-1} and w_{i+1}.
    std::vector<double> cm(m), cp(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j + 1;
        const double hm = s[i] - s[i - 1];
        const double hp = s[i + 1] - s[i];
        cm[j] = dt * 2.0 / ((hm + hp) * hm);
        cp[j] = dt * 2.0 / ((hm + hp) * hp);
    }

    std::vector<double> lower(m), diag(m), upper(m), rhs(m), candidate(n);
    double update = std::numeric_limits<double>::infinity();
    for (int iteration = 1; iteration <= config.max_newton; ++iteration) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t i = j + 1;
            const double u = std::exp(w[i]);
            const double flux = cp[j] * (w[i + 1] - w[i]) - cm[j] * (w[i] - w[i - 1]);
            rhs[j] = -(u - flux - state[i]);
            diag[j] = u + cp[j] + cm[j];
            lower[j] = -cm[j];
            upper[j] = -cp[j];
        }
        solve_tridiagonal(lower, diag, upper, rhs);

        double scale = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= config.max_damping; ++halving, scale *= 0.5) {
            double largest = 0.0;
            bool finite = true;
            candidate = w;
            for (std::size_t j = 0; j < m; ++j) {
                const double delta = scale * rhs[j];
                candidate[j + 1] += delta;
                largest = std::max(largest, std::abs(delta));
                finite = finite && std::isfinite(std::exp(candidate[j + 1])) && std::exp(candidate[j + 1]) > 0.0;
            }
            if (finite && largest <= kMaxLogJump) {
                accepted = true;
                update = largest;
                break;
            }
        }
        if (!accepted) {
            throw StepFailure("step: damping could not keep U positive and finite", update, iteration);
        }
        w.swap(candidate);
        if (update <= config.newton_tol) {
            std::vector<double> values(n);
            for (std::size_t i = 0; i < n; ++i) {
                values[i] = std::exp(w[i]);
            }
            values.front() = inner;
            values.back() = outer;
            return StepResult{ConformalState(state.grid_ptr(), std::move(values), t_new), iteration,
                              update};
        }
    }
    std::ostringstream msg;
    msg << "step: Newton did not converge in " << config.max_newton << " iterations (last update "
        << update << ")";
    throw StepFailure(msg.str(), update, config.max_newton);
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(GridPtr grid, std::string label) : grid_(std::move(grid)), label_(std::move(label)) {
    if (!grid_) {
        throw std::invalid_argument("Trajectory: null grid");
    }
}

void Trajectory::append(const ConformalState& state) {
    if (!(state.grid() == *grid_)) {
        throw IncompatibleError("Trajectory::append: state lives on a different grid");
    }
    if (!states_.empty() && !(state.time() > states_.back().time())) {
        throw DomainError("Trajectory::append: times must be strictly increasing");
    }
    states_.push_back(state);
}

std::vector<double> Trajectory::times() const {
    std::vector<double> out;
    out.reserve(states_.size());
    for (const auto& st : states_) {
        out.push_back(st.time());
    }
    return out;
}

std::optional<std::size_t> Trajectory::find(double t) const {
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (same_time(states_[i].time(), t)) {
            return i;
        }
    }
    return std::nullopt;
}

const ConformalState& Trajectory::at(double t) const {
    if (auto i = find(t)) {
        return states_[*i];
    }
    std::ostringstream msg;
    msg << "Trajectory: time " << t << " was not sampled (no interpolation between snapshots)";
    throw DomainError(msg.str());
}

// ---------------------------------------------------------------------------
// evolve

Trajectory evolve(const ConformalState& initial, const BoundarySchedule& schedule,
                  const SolverConfig& config, double T) {
    if (auto problem = config.validate(); !problem.empty()) {
        throw DomainError("evolve: " + problem);
    }
    const double t0 = initial.time();
    if (!(T > t0) || !std::isfinite(T)) {
        throw DomainError("evolve: terminal time must exceed the initial time");
    }
    std::vector<double> targets;
    for (double ts : config.sample_times) {
        if (ts > t0 && ts < T && !same_time(ts, T) && !same_time(ts, t0)) {
            targets.push_back(ts);
        }
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end(), same_time), targets.end());
    targets.push_back(T);

    Trajectory trajectory(initial.grid_ptr(), schedule.label());
    trajectory.append(initial);

    ConformalState current = initial;
    double t = t0;
    double dt_nominal = config.dt;
    int easy_steps = 0;
    int retries = 0;
    for (double target : targets) {
        while (t < target) {
            const bool reaches = t + dt_nominal >= target || same_time(t + dt_nominal, target);
            const double dt = reaches ? target - t : dt_nominal;
            try {
                StepResult result = step(current, dt, schedule, config);
                ++trajectory.steps_taken;
                trajectory.newton_iterations += static_cast<std::size_t>(result.newton_iterations);
                retries = 0;
                if (reaches) {
                    std::vector<double> values(result.state.values().begin(), result.state.values().end());
                    current = ConformalState(current.grid_ptr(), std::move(values), target);
                    t = target;
                } else {
                    current = std::move(result.state);
                    t = current.time();
                }
                if (config.dt_growth > 1.0) {
                    dt_nominal = std::min(dt_nominal * config.dt_growth, config.dt_max);
                }
                if (config.adaptive) {
                    easy_steps = result.newton_iterations <= 3 ? easy_steps + 1 : 0;
                    if (easy_steps >= 3) {
                        dt_nominal = std::min(2.0 * dt_nominal, config.dt_max);
                        easy_steps = 0;
                    }
                }
            } catch (const StepFailure& failure) {
                ++trajectory.step_failures;
                easy_steps = 0;
                if (++retries > config.max_retries) {
                    std::ostringstream msg;
                    msg << "evolve: step at t = " << t << " failed after " << config.max_retries
                        << " halvings of dt: " << failure.what();
                    throw RunError(msg.str(), trajectory);
                }
                dt_nominal *= 0.5;
            }
        }
        trajectory.append(current);
    }
    return trajectory;
}

Trajectory model_trajectory(ModelKind kind, const GridPtr& grid, const std::vector<double>& times) {
    Trajectory trajectory(grid, "model-" + to_string(kind));
    for (double t : times) {
        trajectory.append(sample_model(kind, grid, t));
    }
    return trajectory;
}

// ---------------------------------------------------------------------------
// exhaust

ExhaustionResult exhaust(const ConformalState& initial, const std::vector<double>& ramps,
                         const SolverConfig& config, double T, double r0, unsigned jobs) {
    if (ramps.empty()) {
        throw DomainError("exhaust: need at least one ramp");
    }
    for (std::size_t i = 1; i < ramps.size(); ++i) {
        if (ramps[i] < ramps[i - 1]) {
            throw DomainError("exhaust: ramps must be nondecreasing");
        }
    }
    const double s0 = s_from_r(r0);

    std::vector<std::optional<Trajectory>> slots(ramps.size());
    std::vector<std::exception_ptr> errors(ramps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ramps.size(); i = next++) {
            try {
                slots[i] = evolve(initial, BoundarySchedule::ramp(initial, ramps[i]), config, T);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ramps.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }

    ExhaustionResult result;
    result.ramps = ramps;
    for (auto& slot : slots) {
        result.trajectories.push_back(std::move(*slot));
    }

    auto& diag = result.diagnostics;
    diag.tolerance = 10.0 * config.newton_tol;
    const auto nodes = initial.grid().nodes();
    for (std::size_t j = 0; j + 1 < ramps.size(); ++j) {
        const auto& lo = result.trajectories[j];
        const auto& hi = result.trajectories[j + 1];
        double min_increment = std::numeric_limits<double>::infinity();
        double sup = 0.0;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                min_increment = std::min(min_increment, std::log(hi[k][i]) - std::log(lo[k][i]));
                if (nodes[i] >= s0) {
                    sup = std::max(sup, std::abs(hi[k][i] - lo[k][i]));
                }
            }
        }
        diag.min_log_increment.push_back(min_increment);
        diag.sup_difference.push_back(sup);
        diag.monotone = diag.monotone && min_increment >= -diag.tolerance;
    }
    return result;
}

// ---------------------------------------------------------------------------

double mms_residual(ModelKind kind, const GridPtr& grid, double t, double dt, const SolverConfig& config) {
    const ConformalState start = sample_model(kind, grid, t);
    const StepResult result = step(start, dt, BoundarySchedule::exact(kind, *grid), config);
    double error = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        error = std::max(error, std::abs(result.state[i] - model_factor(kind, (*grid)[i], t + dt)));
    }
    return error;
}

OrderReport check_order_preservation(const Trajectory& a, const Trajectory& b, double tol) {
    if (!(a.grid() == b.grid())) {
        throw IncompatibleError("check_order_preservation: trajectories live on different grids");
    }
    if (a.size() != b.size()) {
        throw IncompatibleError("check_order_preservation: different numbers of snapshots");
    }
    OrderReport report;
    report.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!same_time(a[k].time(), b[k].time())) {
            throw IncompatibleError("check_order_preservation: sample times differ");
        }
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            const double margin = b[k][i] - a[k][i];
            if (margin < report.min_margin) {
                report.min_margin = margin;
                report.worst_time = a[k].time();
                report.worst_node = i;
            }
        }
    }
    report.ordered = report.min_margin >= -tol;
    return report;
}

}  // namespace logdiff
