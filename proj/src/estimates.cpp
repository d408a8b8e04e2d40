#include "logdiff/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace logdiff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBarrierTolerance = 1e-8;

std::string pairs(std::initializer_list<std::pair<const char*, double>> items) {
    std::string out;
    for (const auto& [name, value] : items) {
        if (!out.empty()) {
            out += ';';
        }
        out += name;
        out += '=';
        out += format_double(value);
    }
    return out;
}

void require_same_samples(const Trajectory& g, const Trajectory& G, const char* who) {
    if (!(g.grid() == G.grid())) {
        throw IncompatibleError(std::string(who) + ": trajectories live on different grids");
    }
    const auto a = g.times();
    const auto b = G.times();
    if (a.size() != b.size()) {
        throw IncompatibleError(std::string(who) + ": trajectories have different sample times");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!g.find(b[i]) || *g.find(b[i]) != i) {
            throw IncompatibleError(std::string(who) + ": trajectories have different sample times");
        }
    }
}

void require_ordered(const Trajectory& g, const Trajectory& G, const char* who) {
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double gap = min_log_gap(g[k], G[k]);
        if (gap < -kOrderTolerance) {
            std::ostringstream msg;
            msg << who << ": pair is not ordered at t = " << g[k].time() << " (min log V - log U = " << gap
                << "); use the volume-excess variant";
            throw IncompatibleError(msg.str());
        }
    }
}

// Derivative at x[0] from three points (Lagrange); works for either orientation.
double one_sided_derivative(double x0, double x1, double x2, double f0, double f1, double f2) {
    const double h1 = x1 - x0;
    const double h2 = x2 - x0;
    return -(h1 + h2) / (h1 * h2) * f0 + h2 / (h1 * (h2 - h1)) * f1 - h1 / (h2 * (h2 - h1)) * f2;
}

std::vector<double> log_gap(const ConformalState& U, const ConformalState& V) {
    std::vector<double> d(U.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = std::log(V[i]) - std::log(U[i]);
    }
    return d;
}

double root(double x, double gamma) {
    return std::pow(std::max(x, 0.0), 1.0 / (1.0 + gamma));
}

bool barrier_holds(const Trajectory& trajectory) {
    return lower_barrier_check(trajectory).passed(kBarrierTolerance);
}

EstimateReport area_certificate(const Trajectory& g, const Trajectory& G, double r0, double R, double gamma,
                                bool positive_part, const char* id) {
    const CutoffSpec spec = CutoffSpec::make(r0, R, gamma);
    require_same_samples(g, G, id);
    if (!positive_part) {
        require_ordered(g, G, id);
    }
    if (spec.S < g.grid().s_min()) {
        throw DomainError(std::string(id) + ": D_R reaches outside the grid (S < s_min)");
    }
    const double constant = area_estimate_constant(gamma);
    const double scale = spec.s0 * std::pow(std::log(spec.s0) - std::log(spec.S), gamma);
    const double t0 = g[0].time();
    const double initial = area_difference(g[0], G[0], R, positive_part);

    EstimateReport report;
    const std::string used = pairs({{"C", constant}, {"initial", initial}, {"s0", spec.s0}, {"S", spec.S}});
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double t = g[k].time();
        EstimateRow row;
        row.time = t;
        row.id = id;
        row.lhs = root(area_difference(g[k], G[k], r0, positive_part), gamma);
        row.rhs = root(initial, gamma) + constant * std::pow((t - t0) / scale, 1.0 / (1.0 + gamma));
        row.constants = used;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constants

double barrier_constant() {
    const double l = std::numbers::ln2;
    return 9.0 / (32.0 * l * l);
}

double odi_constant(double gamma) {
    if (!(gamma > 0.0 && gamma < 0.5)) {
        throw DomainError("odi_constant: gamma in (0, 1/2)");
    }
    const double p = 1.0 / (1.0 + gamma);
    return (1.0 + gamma) / gamma * std::pow(kTwoPi, p) * std::pow(barrier_constant(), gamma * p);
}

double area_estimate_constant(double gamma) {
    return odi_constant(gamma) * std::pow(q_constants(gamma).total, 1.0 / (1.0 + gamma));
}

double envelope_constant(double gamma, double r0) {
    if (!(r0 > 0.5 && r0 < 1.0)) {
        throw DomainError("envelope_constant: r0 in (1/2, 1)");
    }
    const double s0 = -std::log(r0);
    return std::pow(area_estimate_constant(gamma), 1.0 + gamma) / s0 *
           std::pow(1.0 - std::log(s0) / std::log(3.0), gamma);
}

double area_envelope(double gamma, double r0, double R, double t) {
    if (!(R > 0.0 && R < 1.0)) {
        throw DomainError("area_envelope: R in (0, 1)");
    }
    return envelope_constant(gamma, r0) * t / std::pow(-std::log(-std::log(R)), gamma);
}

std::vector<ConstantsRow> constants_table(const std::vector<double>& gammas) {
    std::vector<ConstantsRow> rows;
    for (double g : gammas) {
        rows.push_back({g, barrier_constant(), odi_constant(g), q_constants(g), area_estimate_constant(g)});
    }
    return rows;
}

CsvTable constants_csv(const std::vector<ConstantsRow>& rows) {
    CsvTable table;
    table.header = {"gamma", "barrier", "odi", "q_far", "q_near_integral", "q_near",
                    "q_absorption", "q_conversion", "q_total", "area_estimate"};
    for (const auto& r : rows) {
        table.add_row({format_double(r.gamma), format_double(r.barrier), format_double(r.odi),
                       format_double(r.q.far), format_double(r.q.near_integral), format_double(r.q.near),
                       format_double(r.q.absorption), format_double(r.q.conversion),
                       format_double(r.q.total), format_double(r.area_estimate)});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Reports

bool EstimateReport::passed(double tol) const {
    return precondition_ok && std::all_of(rows.begin(), rows.end(), [tol](const EstimateRow& r) {
               return std::isfinite(r.margin()) && r.margin() >= -tol;
           });
}

double EstimateReport::min_margin() const {
    double m = kInf;
    for (const auto& r : rows) {
        m = std::min(m, r.margin());
    }
    return m;
}

void EstimateReport::append(const EstimateReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    precondition_ok = precondition_ok && other.precondition_ok;
    if (!other.note.empty()) {
        note += note.empty() ? other.note : "; " + other.note;
    }
}

CsvTable estimate_csv(const EstimateReport& report) {
    CsvTable table;
    table.header = {"time", "id", "lhs", "rhs", "margin", "constants"};
    for (const auto& r : report.rows) {
        table.add_row({format_double(r.time), r.id, format_double(r.lhs), format_double(r.rhs),
                       format_double(r.margin()), r.constants});
    }
    return table;
}

// ---------------------------------------------------------------------------
// J

double compute_J(const Trajectory& g, const Trajectory& G, const CutoffSpec& spec, double t, JVariant variant) {
    if (!(g.grid() == G.grid())) {
        throw IncompatibleError("compute_J: trajectories live on different grids");
    }
    const auto& U = g.at(t);
    const auto& V = G.at(t);
    require_cutoff_resolution(U.grid(), spec, "compute_J");
    std::vector<double> diff(U.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = V[i] - U[i];
        if (variant == JVariant::PositivePart) {
            diff[i] = std::max(diff[i], 0.0);
        }
    }
    const Cutoff cutoff(spec);
    return weighted_integral(U.grid(), diff, [&](double s) { return cutoff.value(s); }, spec.S, false);
}

double DJdtCheck::relative_discrepancy() const noexcept {
    const double scale = std::max(std::abs(finite_difference), std::abs(identity_value()));
    return scale == 0.0 ? 0.0 : std::abs(discrepancy()) / scale;
}

DJdtCheck djdt_identity_check(const Trajectory& g, const Trajectory& G, const CutoffSpec& spec, double t) {
    require_same_samples(g, G, "djdt_identity_check");
    if (g.size() < 2) {
        throw SizeError("djdt_identity_check: need at least two samples");
    }
    const auto k = g.find(t);
    if (!k) {
        throw DomainError("djdt_identity_check: t was not sampled");
    }
    const std::size_t lo = *k == 0 ? 0 : *k - 1;
    const std::size_t hi = *k + 1 == g.size() ? *k : *k + 1;

    DJdtCheck check;
    check.time = g[*k].time();
    check.finite_difference = (compute_J(g, G, spec, g[hi].time()) - compute_J(g, G, spec, g[lo].time())) /
                              (g[hi].time() - g[lo].time());

    const auto& grid = g.grid();
    const auto s = grid.nodes();
    const std::vector<double> d = log_gap(g[*k], G[*k]);
    const Cutoff cutoff(spec);

    // D is linear between nodes; phi'' is smooth between S, s0/2 and s0.
    std::vector<double> breaks;
    const double upper = std::min(spec.s0, grid.s_max());
    breaks.push_back(spec.S);
    for (double x : s) {
        if (x > spec.S && x < upper) {
            breaks.push_back(x);
        }
    }
    breaks.push_back(upper);
    if (0.5 * spec.s0 < upper) {
        breaks.push_back(0.5 * spec.s0);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    quadrature::Options opts;
    opts.rel_tol = 1e-11;
    double bulk = 0.0;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        auto integrand = [&](double x) {
            return quadrature::interpolate(s, d, x) * cutoff.second_derivative(x);
        };
        bulk += quadrature::gauss_kronrod(integrand, breaks[j], breaks[j + 1], opts).value;
    }
    check.bulk = kTwoPi * bulk;

    const std::size_t n = s.size();
    const double d_inner = one_sided_derivative(s[0], s[1], s[2], d[0], d[1], d[2]);
    const double d_outer =
        one_sided_derivative(s[n - 1], s[n - 2], s[n - 3], d[n - 1], d[n - 2], d[n - 3]);
    auto boundary = [&](double x, double dv, double dd) {
        return kTwoPi * (cutoff.value(x) * dd - cutoff.derivative(x) * dv);
    };
    check.boundary_inner = boundary(s[0], d[0], d_inner);
    check.boundary_outer = boundary(s[n - 1], d[n - 1], d_outer);
    return check;
}

// ---------------------------------------------------------------------------
// Pointwise bounds

EstimateReport lower_barrier_check(const Trajectory& trajectory) {
    EstimateReport report;
    const auto s = trajectory.grid().nodes();
    for (const auto& state : trajectory.states()) {
        const double t = state.time();
        EstimateRow row{t, "lower_barrier", 0.0, 0.0, ""};
        double worst = kInf;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double barrier = 2.0 * t * hyperbolic_factor(s[i]);
            if (state[i] - barrier < worst) {
                worst = state[i] - barrier;
                row.lhs = barrier;
                row.rhs = state[i];
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

EstimateReport pointwise_u_inverse_bound(const Trajectory& trajectory, double t, double s0, double barrier_tol) {
    if (!(t > 0.0)) {
        throw DomainError("pointwise_u_inverse_bound: t must be positive");
    }
    if (!(s0 > 0.0 && s0 <= std::numbers::ln2 * (1.0 + 1e-15))) {
        throw DomainError("pointwise_u_inverse_bound: s0 in (0, log 2]");
    }
    const auto& state = trajectory.at(t);
    const auto s = trajectory.grid().nodes();
    EstimateReport report;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (state[i] - 2.0 * t * hyperbolic_factor(s[i]) < -barrier_tol) {
            report.precondition_ok = false;
            std::ostringstream msg;
            msg << "lower barrier fails at t = " << t << ", s = " << s[i] << "; bound not asserted";
            report.note = msg.str();
            return report;
        }
    }
    const double c = barrier_constant();
    EstimateRow row{t, "u_inverse", 0.0, 0.0, pairs({{"C", c}, {"s0", s0}})};
    double worst = kInf;
    for (std::size_t i = 0; i < s.size() && s[i] < s0; ++i) {
        const double lhs = 1.0 / state[i];
        const double rhs = c * s[i] * s[i] / t;
        if (rhs - lhs < worst) {
            worst = rhs - lhs;
            row.lhs = lhs;
            row.rhs = rhs;
        }
    }
    if (worst == kInf) {
        report.note = "no nodes in (0, s0)";
    } else {
        report.rows.push_back(std::move(row));
    }
    return report;
}

double min_log_gap(const ConformalState& U, const ConformalState& V) {
    if (!(U.grid() == V.grid())) {
        throw IncompatibleError("min_log_gap: states live on different grids");
    }
    double gap = kInf;
    for (std::size_t i = 0; i < U.size(); ++i) {
        gap = std::min(gap, std::log(V[i]) - std::log(U[i]));
    }
    return gap;
}

// ---------------------------------------------------------------------------
// Integrated inequalities

EstimateReport main_odi_check(const Trajectory& g, const Trajectory& G, const CutoffSpec& spec) {
    require_same_samples(g, G, "main_odi_check");
    require_ordered(g, G, "main_odi_check");
    EstimateReport report;
    if (!barrier_holds(g)) {
        report.precondition_ok = false;
        report.note = "lower barrier fails for g; main ODI not asserted";
        return report;
    }
    const double gamma = spec.gamma;
    const double p = 1.0 / (1.0 + gamma);
    const double q = compute_Q(spec).q;
    const double c = odi_constant(gamma);
    const std::string used = pairs({{"C*", c}, {"Q", q}});
    std::vector<double> j(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        j[k] = compute_J(g, G, spec, g[k].time());
    }
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const double t1 = g[k].time();
        const double t2 = g[k + 1].time();
        EstimateRow row;
        row.time = t2;
        row.id = "main_odi";
        row.lhs = root(j[k + 1], gamma) - root(j[k], gamma);
        row.rhs = c * (std::pow(t2, p) - std::pow(t1, p)) * std::pow(q, p);
        row.constants = used;
        report.rows.push_back(std::move(row));
    }
    return report;
}

double area_difference(const ConformalState& U, const ConformalState& V, double r, bool positive_part) {
    if (!(U.grid() == V.grid())) {
        throw IncompatibleError("area_difference: states live on different grids");
    }
    std::vector<double> diff(U.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = V[i] - U[i];
        if (positive_part) {
            diff[i] = std::max(diff[i], 0.0);
        }
    }
    return weighted_integral(U.grid(), diff, [](double) { return 1.0; }, s_from_r(r), true);
}

EstimateReport interior_area_verify(const Trajectory& g, const Trajectory& G, double r0, double R, double gamma) {
    return area_certificate(g, G, r0, R, gamma, false, "interior_area");
}

EstimateReport volume_excess_verify(const Trajectory& g, const Trajectory& G, double r0, double R, double gamma) {
    return area_certificate(g, G, r0, R, gamma, true, "volume_excess");
}

EstimateReport curvature_monotonicity_check(const Trajectory& trajectory, double curvature_tol) {
    EstimateReport report;
    for (const auto& state : trajectory.states()) {
        const auto k = gauss_curvature(state);
        const double k_min = *std::min_element(k.begin(), k.end());
        if (k_min < -1.0 - curvature_tol) {
            report.precondition_ok = false;
            std::ostringstream msg;
            msg << "curvature " << k_min << " < -1 at t = " << state.time() << "; monotonicity not asserted";
            report.note = msg.str();
            return report;
        }
    }
    for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
        const auto& a = trajectory[k];
        const auto& b = trajectory[k + 1];
        const double ea = std::exp(-2.0 * a.time());
        const double eb = std::exp(-2.0 * b.time());
        EstimateRow row{b.time(), "curvature_monotone", 0.0, 0.0, ""};
        double worst = kInf;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (ea * a[i] - eb * b[i] < worst) {
                worst = ea * a[i] - eb * b[i];
                row.lhs = eb * b[i];
                row.rhs = ea * a[i];
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Proof-chain steps

double log_ratio_inequality_margin(const ConformalState& U, const ConformalState& V, double gamma) {
    if (!(gamma > 0.0)) {
        throw DomainError("log_ratio_inequality_margin: gamma must be positive");
    }
    if (!(U.grid() == V.grid())) {
        throw IncompatibleError("log_ratio_inequality_margin: states live on different grids");
    }
    double margin = kInf;
    for (std::size_t i = 0; i < U.size(); ++i) {
        if (V[i] < U[i]) {
            continue;
        }
        const double lhs = std::log(V[i]) - std::log(U[i]);
        const double rhs = (1.0 + gamma) / gamma * std::pow((V[i] - U[i]) / U[i], gamma / (1.0 + gamma));
        margin = std::min(margin, rhs - lhs);
    }
    return margin;
}

HolderCheck holder_step_check(const ConformalState& U, const ConformalState& V, const CutoffSpec& spec) {
    if (!(U.grid() == V.grid())) {
        throw IncompatibleError("holder_step_check: states live on different grids");
    }
    const Cutoff cutoff(spec);
    const double gamma = spec.gamma;
    const double p = (1.0 + gamma) / gamma;
    const double q = 1.0 + gamma;
    const double e = gamma / (1.0 + gamma);
    const auto s = U.grid().nodes();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > spec.S && s[i] < 0.5 * spec.s0) {
            idx.push_back(i);
        }
    }
    if (idx.size() < 2) {
        throw ResolutionError("holder_step_check: fewer than two nodes in (S, s0/2)");
    }
    double ab = 0.0, ap = 0.0, bq = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const std::size_t i = idx[j];
        const double left = j > 0 ? s[i] - s[idx[j - 1]] : 0.0;
        const double right = j + 1 < idx.size() ? s[idx[j + 1]] - s[i] : 0.0;
        const double w = 0.5 * (left + right);
        const double phi = cutoff.value(s[i]);
        const double a = std::pow(std::max(V[i] - U[i], 0.0) * phi, e);
        const double b = std::pow(U[i] * phi, -e) * std::abs(cutoff.second_derivative(s[i]));
        ab += w * a * b;
        ap += w * std::pow(a, p);
        bq += w * std::pow(b, q);
    }
    return {kTwoPi * ab, kTwoPi * std::pow(ap, 1.0 / p) * std::pow(bq, 1.0 / q)};
}

}  // namespace logdiff
