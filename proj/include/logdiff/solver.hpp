#pragma once

#include "logdiff/conformal.hpp"
#include "logdiff/errors.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace logdiff {

/// Dirichlet values at s_min (disc-boundary side) and s_max (centre side).
class BoundarySchedule {
public:
    using ValueFn = std::function<double(double)>;

    BoundarySchedule(ValueFn inner, ValueFn outer, std::string label = "custom");

    /// Time-independent values.
    static BoundarySchedule fixed(double inner, double outer);
    /// Closed-form values of a model solution at both grid ends.
    static BoundarySchedule exact(ModelKind kind, const LogPolarGrid& grid);
    /// Standard exhaustion ramp: inner max(U0(s_min), k * 2H(s_min) * t), outer U0(s_max).
    ///
    /// The slope is measured in units of the big-bang boundary rate 2H(s_min),
    /// so any k >= 1 keeps the boundary above the big-bang flow.
    static BoundarySchedule ramp(const ConformalState& initial, double k);
    /// Ramp k_before up to t_switch, then k_after.
    static BoundarySchedule switched_ramp(const ConformalState& initial, double k_before,
                                          double k_after, double t_switch);

    double inner(double t) const { return inner_(t); }
    double outer(double t) const { return outer_(t); }
    const std::string& label() const noexcept { return label_; }

private:
    ValueFn inner_;
    ValueFn outer_;
    std::string label_;
};

/// Ramp slope k * 2H(s_min) used by BoundarySchedule::ramp.
double ramp_slope(double k, double s_min);

struct SolverConfig {
    /// Initial time step.
    double dt = 1e-3;
    /// Cap for the growing and adaptive policies.
    double dt_max = 1e-2;
    /// Fixed geometric growth per accepted step (1 = constant).
    double dt_growth = 1.0;
    /// Double dt after 3 consecutive steps needing <= 3 Newton iterations.
    bool adaptive = false;
    /// Max-norm of the log-variable Newton update at convergence.
    double newton_tol = 1e-10;
    int max_newton = 50;
    int max_damping = 30;
    /// Consecutive halvings of dt after step failures before giving up.
    int max_retries = 10;
    /// Snapshot times in (t0, T); the terminal time is always recorded.
    std::vector<double> sample_times;

    /// Empty when valid.
    std::string validate() const;
};

struct StepResult {
    ConformalState state;
    int newton_iterations;
    double last_update;
};

/// One backward-Euler step of dU/dt = (log U)_ss, solved by Newton in w = log U.
/// Throws StepFailure when Newton does not converge.
StepResult step(const ConformalState& state, double dt, const BoundarySchedule& schedule,
                const SolverConfig& config = {});

/// Snapshots of one flow on one grid at strictly increasing times.
class Trajectory {
public:
    Trajectory(GridPtr grid, std::string label = {});

    void append(const ConformalState& state);

    const LogPolarGrid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const std::vector<ConformalState>& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return states_.size(); }
    const ConformalState& operator[](std::size_t i) const { return states_[i]; }
    std::vector<double> times() const;
    /// Index of the snapshot at time t (relative match 1e-12); nullopt if not sampled.
    std::optional<std::size_t> find(double t) const;
    /// Snapshot at time t; throws DomainError if t was not sampled.
    const ConformalState& at(double t) const;

    const std::string& label() const noexcept { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    std::size_t steps_taken = 0;
    std::size_t newton_iterations = 0;
    std::size_t step_failures = 0;

private:
    GridPtr grid_;
    std::vector<ConformalState> states_;
    std::string label_;
};

/// Failure of a whole run; carries the trajectory computed so far.
class RunError : public NumericalError {
public:
    RunError(const std::string& what, Trajectory partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Integrate from initial.time() to T, recording the initial state, every
/// configured sample time in between, and T.
Trajectory evolve(const ConformalState& initial, const BoundarySchedule& schedule,
                  const SolverConfig& config, double T);

/// Closed-form trajectory of a model solution at the given times.
Trajectory model_trajectory(ModelKind kind, const GridPtr& grid, const std::vector<double>& times);

struct ExhaustionDiagnostics {
    /// min over nodes and common times of w_{k_{j+1}} - w_{k_j}, per successive pair.
    std::vector<double> min_log_increment;
    /// max over nodes in D_{r0} and common times of |U_{k_{j+1}} - U_{k_j}|, per successive pair.
    std::vector<double> sup_difference;
    /// Ordering in k holds up to tolerance for every pair.
    bool monotone = true;
    double tolerance = 0.0;
};

struct ExhaustionResult {
    std::vector<double> ramps;
    std::vector<Trajectory> trajectories;
    ExhaustionDiagnostics diagnostics;
};

/// One trajectory per ramp k (nondecreasing) from the same initial data.
/// Members run concurrently on up to `jobs` threads; results do not depend on jobs.
/// The diagnostics use D_{r0} for the sup differences.
ExhaustionResult exhaust(const ConformalState& initial, const std::vector<double>& ramps,
                         const SolverConfig& config, double T, double r0, unsigned jobs = 1);

/// Max-norm error of one step from the exact state at t against the closed form at t + dt.
double mms_residual(ModelKind kind, const GridPtr& grid, double t, double dt,
                    const SolverConfig& config = {});

struct OrderReport {
    bool ordered = true;
    /// min over nodes and times of U_b - U_a.
    double min_margin = 0.0;
    double worst_time = 0.0;
    std::size_t worst_node = 0;
};

/// Checks U_a <= U_b + tol at every node and common time. Throws
/// IncompatibleError when grids or sample times differ.
OrderReport check_order_preservation(const Trajectory& a, const Trajectory& b, double tol = 0.0);

}  // namespace logdiff
