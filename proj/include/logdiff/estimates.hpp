#pragma once

#include "logdiff/conformal.hpp"
#include "logdiff/flux.hpp"
#include "logdiff/io.hpp"
#include "logdiff/solver.hpp"

#include <string>
#include <vector>

namespace logdiff {

// ---------------------------------------------------------------------------
// Tracked constants

/// C = 9/(32 log^2 2) in 1/U <= C s^2/t on (0, log 2).
double barrier_constant();

/// C*(g) = (1+g)/g * (2 pi)^{1/(1+g)} * C^{g/(1+g)} of the integrated main ODI.
double odi_constant(double gamma);

/// C*(g) * C_Q(g)^{1/(1+g)}: the constant of the interior area estimate in
/// its (t / (s0 (log s0 - log S)^g))^{1/(1+g)} form.
double area_estimate_constant(double gamma);

/// C(g, r0) of the envelope C(g, r0) t / (-log(-log R))^g for equal initial data.
double envelope_constant(double gamma, double r0);

/// C(g, r0) t / (-log(-log R))^g.
double area_envelope(double gamma, double r0, double R, double t);

struct ConstantsRow {
    double gamma;
    double barrier;        ///< C
    double odi;            ///< C*(g)
    QConstants q;          ///< pieces of C_Q(g)
    double area_estimate;  ///< C*(g) C_Q(g)^{1/(1+g)}
};

std::vector<ConstantsRow> constants_table(const std::vector<double>& gammas);
CsvTable constants_csv(const std::vector<ConstantsRow>& rows);

// ---------------------------------------------------------------------------
// Reports

/// One certified inequality lhs <= rhs at one time.
struct EstimateRow {
    double time = 0.0;
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Constants used, as name=value pairs separated by ';'.
    std::string constants;

    double margin() const noexcept { return rhs - lhs; }
};

struct EstimateReport {
    std::vector<EstimateRow> rows;
    /// False when a hypothesis of the inequality failed; rows are then not certificates.
    bool precondition_ok = true;
    std::string note;

    /// Precondition held and every margin >= -tol.
    bool passed(double tol = 0.0) const;
    double min_margin() const;
    void append(const EstimateReport& other);
};

CsvTable estimate_csv(const EstimateReport& report);

// ---------------------------------------------------------------------------
// J and its derivative

enum class JVariant { Ordered, PositivePart };

/// 2 pi int_S^{s_max} (V - U) phi ds (or (V - U)_+) with U = g, V = G at a
/// common sample time t. Throws DomainError when t was not sampled.
double compute_J(const Trajectory& g, const Trajectory& G, const CutoffSpec& spec, double t,
                 JVariant variant = JVariant::Ordered);

struct DJdtCheck {
    double time = 0.0;
    /// Centered difference of J over the neighbouring samples (one-sided at the ends).
    double finite_difference = 0.0;
    /// 2 pi int_S^{s_max} (log V - log U) phi'' ds.
    double bulk = 0.0;
    /// 2 pi [phi D' - phi' D] at s_min and s_max, D = log V - log U.
    double boundary_inner = 0.0;
    double boundary_outer = 0.0;

    double identity_value() const noexcept { return bulk + boundary_outer - boundary_inner; }
    double discrepancy() const noexcept { return finite_difference - identity_value(); }
    /// |discrepancy| / max(|finite_difference|, |identity_value|); 0 when both vanish.
    double relative_discrepancy() const noexcept;
};

/// Needs at least two samples. D' at the ends uses one-sided three-point differences.
DJdtCheck djdt_identity_check(const Trajectory& g, const Trajectory& G, const CutoffSpec& spec, double t);

// ---------------------------------------------------------------------------
// Pointwise bounds

/// Per sample time: min over nodes of U - 2tH, reported at the worst node.
EstimateReport lower_barrier_check(const Trajectory& trajectory);

/// 1/U <= C s^2 / t on nodes in (0, s0) at time t > 0. The precondition is the
/// lower barrier at t (margin >= -barrier_tol); when it fails no rows are produced.
EstimateReport pointwise_u_inverse_bound(const Trajectory& trajectory, double t,
                                         double s0 = 0.69314718055994531, double barrier_tol = 1e-8);

/// Smallest log V - log U over the nodes. Throws IncompatibleError for different grids.
double min_log_gap(const ConformalState& U, const ConformalState& V);

/// Default tolerance in log U for treating a pair as ordered.
inline constexpr double kOrderTolerance = 1e-8;

// ---------------------------------------------------------------------------
// Integrated inequalities

/// J^{1/(1+g)}(t2) - J^{1/(1+g)}(t1) <= C*(g) (t2^{1/(1+g)} - t1^{1/(1+g)}) Q^{1/(1+g)}
/// for every pair of consecutive samples. Throws IncompatibleError for unordered pairs.
EstimateReport main_odi_check(const Trajectory& g, const Trajectory& G, const CutoffSpec& spec);

/// Area estimate on D_{r0} with the cut-off built for (r0, R, gamma):
/// [Vol_G D_{r0} - Vol_g D_{r0}]^{1/(1+g)} <= [Vol_G D_R - Vol_g D_R]^{1/(1+g)}(t0)
///     + C (t - t0)^{1/(1+g)} / (s0 (log s0 - log S)^g)^{1/(1+g)},
/// t0 the first sample. Throws DomainError for invalid (r0, R, gamma) and
/// IncompatibleError for unordered pairs.
EstimateReport interior_area_verify(const Trajectory& g, const Trajectory& G, double r0, double R, double gamma);

/// The same certificate for the volume excess 2 pi int (V - U)_+ (no ordering needed).
EstimateReport volume_excess_verify(const Trajectory& g, const Trajectory& G, double r0, double R, double gamma);

/// Area of D_{r} between two states: 2 pi int_{s(r)}^{s_max} (V - U) ds plus the
/// tail difference; positive part taken nodewise when requested.
double area_difference(const ConformalState& U, const ConformalState& V, double r, bool positive_part);

/// e^{-2t} U nonincreasing in t at every node over consecutive samples, provided
/// every sampled state has K >= -1 - curvature_tol. Rows carry the worst node per interval.
EstimateReport curvature_monotonicity_check(const Trajectory& trajectory, double curvature_tol = 1e-3);

// ---------------------------------------------------------------------------
// Steps of the proof chain, checked on discrete data

/// log V - log U <= (1+g)/g ((V - U)/U)^{g/(1+g)} at every node with V >= U.
/// Returns the smallest margin.
double log_ratio_inequality_margin(const ConformalState& U, const ConformalState& V, double gamma);

struct HolderCheck {
    double product;  ///< int a b over [S, s0/2]
    double bound;    ///< (int a^p)^{1/p} (int b^q)^{1/q}
};

/// The Holder step with p = (1+g)/g, q = 1+g, a = ((V-U) phi)^{g/(1+g)},
/// b = U^{-g/(1+g)} phi^{-g/(1+g)} phi'' on the grid nodes in (S, s0/2).
HolderCheck holder_step_check(const ConformalState& U, const ConformalState& V, const CutoffSpec& spec);

}  // namespace logdiff
