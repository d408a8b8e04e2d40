#include "logdiff/conformal.hpp"

#include "logdiff/errors.hpp"
#include "logdiff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace logdiff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double s_from_r(double r) {
    if (!(r > 0.0 && r < 1.0)) {
        std::ostringstream msg;
        msg << "s_from_r: radius must lie in (0, 1), got " << r;
        throw DomainError(msg.str());
    }
    return -std::log(r);
}

double r_from_s(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        std::ostringstream msg;
        msg << "r_from_s: s must be positive and finite, got " << s;
        throw DomainError(msg.str());
    }
    return std::exp(-s);
}

double hyperbolic_factor(double s) {
    if (!(s > 0.0)) {
        throw DomainError("hyperbolic_factor: s must be positive");
    }
    const double sh = std::sinh(s);
    return 1.0 / (sh * sh);
}

// ---------------------------------------------------------------------------
// LogPolarGrid

LogPolarGrid::LogPolarGrid(std::vector<double> nodes, std::optional<double> grading)
    : nodes_(std::move(nodes)), grading_(grading) {
    if (nodes_.size() < 3) {
        throw SizeError("LogPolarGrid: need at least 3 nodes");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i]) || !(nodes_[i] > 0.0)) {
            throw DomainError("LogPolarGrid: nodes must be finite and positive");
        }
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
            throw DomainError("LogPolarGrid: nodes must be strictly increasing");
        }
    }
}

LogPolarGrid LogPolarGrid::uniform(double s_min, double s_max, std::size_t count) {
    return graded(s_min, s_max, count, 1.0);
}

LogPolarGrid LogPolarGrid::graded(double s_min, double s_max, std::size_t count, double ratio) {
    if (count < 3) {
        throw SizeError("LogPolarGrid::graded: need at least 3 nodes");
    }
    if (!(s_min > 0.0) || !(s_max > s_min) || !std::isfinite(s_max)) {
        throw DomainError("LogPolarGrid::graded: need 0 < s_min < s_max < inf");
    }
    if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
        throw DomainError("LogPolarGrid::graded: ratio must be >= 1");
    }
    const double length = s_max - s_min;
    const auto last = static_cast<double>(count - 1);
    std::vector<double> nodes(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto x = static_cast<double>(i);
        const double fraction =
            ratio == 1.0 ? x / last : std::expm1(x * std::log(ratio)) / std::expm1(last * std::log(ratio));
        nodes[i] = s_min + length * fraction;
    }
    nodes.front() = s_min;
    nodes.back() = s_max;
    return LogPolarGrid(std::move(nodes), ratio);
}

LogPolarGrid LogPolarGrid::refined() const {
    const std::size_t n = nodes_.size();
    std::vector<double> fine(2 * n - 1);
    std::optional<double> grading;
    if (grading_) {
        const double ratio = std::sqrt(*grading_);
        const LogPolarGrid full = graded(s_min(), s_max(), 2 * n - 1, ratio);
        fine.assign(full.nodes().begin(), full.nodes().end());
        grading = ratio;
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            fine[2 * i + 1] = 0.5 * (nodes_[i] + nodes_[i + 1]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        fine[2 * i] = nodes_[i];  // shared nodes stay bit-identical
    }
    return LogPolarGrid(std::move(fine), grading);
}

GridPtr make_grid(LogPolarGrid grid) {
    return std::make_shared<const LogPolarGrid>(std::move(grid));
}

// ---------------------------------------------------------------------------
// ConformalState

ConformalState::ConformalState(GridPtr grid, std::vector<double> values, double time)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
    if (!grid_) {
        throw std::invalid_argument("ConformalState: null grid");
    }
    if (values_.size() != grid_->size()) {
        throw SizeError("ConformalState: value count does not match the grid");
    }
    if (!(time_ >= 0.0) || !std::isfinite(time_)) {
        throw DomainError("ConformalState: time must be finite and nonnegative");
    }
    for (double u : values_) {
        if (!(u > 0.0) || !std::isfinite(u)) {
            throw DomainError("ConformalState: conformal factor must be positive and finite");
        }
    }
}

// ---------------------------------------------------------------------------
// Model solutions

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::BigBang:
        return "bigbang";
    case ModelKind::Cusp:
        return "cusp";
    case ModelKind::FlatDisc:
        return "flat";
    case ModelKind::Poincare:
        return "poincare";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (ModelKind kind : {ModelKind::BigBang, ModelKind::Cusp, ModelKind::FlatDisc, ModelKind::Poincare}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw DomainError("unknown model '" + name + "' (expected bigbang, cusp, flat or poincare)");
}

bool is_time_dependent(ModelKind kind) {
    return kind == ModelKind::BigBang || kind == ModelKind::Cusp;
}

double model_factor(ModelKind kind, double s, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("model_factor: time must be finite and nonnegative");
    }
    switch (kind) {
    case ModelKind::BigBang:
        return 2.0 * t * hyperbolic_factor(s);
    case ModelKind::Cusp:
        if (!(s > 0.0)) {
            throw DomainError("model_factor: s must be positive");
        }
        return 2.0 * t / (s * s);
    case ModelKind::FlatDisc:
        if (!(s >= 0.0)) {
            throw DomainError("model_factor: s must be nonnegative");
        }
        return std::exp(-2.0 * s);
    case ModelKind::Poincare:
        return hyperbolic_factor(s);
    }
    return 0.0;
}

ConformalState sample_model(ModelKind kind, const GridPtr& grid, double t) {
    std::vector<double> values(grid->size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = model_factor(kind, (*grid)[i], t);
    }
    return ConformalState(grid, std::move(values), t);
}

// ---------------------------------------------------------------------------
// Curvature and areas

double second_difference(std::span<const double> s, std::span<const double> w, std::size_t i) {
    const double hm = s[i] - s[i - 1];
    const double hp = s[i + 1] - s[i];
    return 2.0 / (hm + hp) * ((w[i + 1] - w[i]) / hp - (w[i] - w[i - 1]) / hm);
}

std::vector<double> gauss_curvature(const ConformalState& state) {
    const std::size_t n = state.size();
    if (n < 3) {
        throw SizeError("gauss_curvature: need at least 3 nodes");
    }
    std::vector<double> log_u(n);
    for (std::size_t i = 0; i < n; ++i) {
        log_u[i] = std::log(state[i]);
    }
    std::vector<double> curvature(n - 2);
    const auto s = state.grid().nodes();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        curvature[i - 1] = -second_difference(s, log_u, i) / (2.0 * state[i]);
    }
    return curvature;
}

double annulus_area(const ConformalState& state, double s_lo, double s_hi) {
    const auto& grid = state.grid();
    if (!(s_lo >= grid.s_min() && s_hi <= grid.s_max() && s_lo <= s_hi)) {
        throw DomainError("annulus_area: interval must satisfy s_min <= s_lo <= s_hi <= s_max");
    }
    return kTwoPi * quadrature::trapezoid(grid.nodes(), state.values(), s_lo, s_hi);
}

double centre_tail_area(const ConformalState& state) {
    return kTwoPi * 0.5 * state.values().back();
}

double disc_area(const ConformalState& state, double r0) {
    const double s0 = s_from_r(r0);
    const auto& grid = state.grid();
    if (s0 < grid.s_min() || s0 > grid.s_max()) {
        throw DomainError("disc_area: s(r0) lies outside the grid");
    }
    return annulus_area(state, s0, grid.s_max()) + centre_tail_area(state);
}

double weighted_integral(const LogPolarGrid& grid, std::span<const double> values,
                         const std::function<double(double)>& weight, double s_from,
                         bool include_tail) {
    if (values.size() != grid.size()) {
        throw SizeError("weighted_integral: value count does not match the grid");
    }
    if (s_from < grid.s_min() || s_from > grid.s_max()) {
        throw DomainError("weighted_integral: lower limit outside the grid");
    }
    const std::size_t n = grid.size();
    const auto nodes = grid.nodes();
    std::vector<double> product(n);
    for (std::size_t i = 0; i < n; ++i) {
        product[i] = nodes[i] < s_from ? 0.0 : values[i] * weight(nodes[i]);
    }
    // The partial cell at s_from interpolates towards weight(s_from) * y(s_from).
    const auto first = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), s_from) - nodes.begin());
    double integral = 0.0;
    if (first < n) {
        const double y_from = quadrature::interpolate(nodes, values, s_from) * weight(s_from);
        integral = 0.5 * (nodes[first] - s_from) * (y_from + product[first]);
        integral += quadrature::trapezoid(nodes, product, nodes[first], grid.s_max());
    }
    double total = kTwoPi * integral;
    if (include_tail) {
        total += kTwoPi * 0.5 * values.back() * weight(grid.s_max());
    }
    return total;
}

double weighted_area(const ConformalState& state, const std::function<double(double)>& weight,
                     double s_from) {
    return weighted_integral(state.grid(), state.values(), weight, s_from, true);
}

void require_cutoff_resolution(const LogPolarGrid& grid, const CutoffSpec& spec, const char* who) {
    if (spec.S < grid.s_min() || spec.s0 > grid.s_max()) {
        throw DomainError(std::string(who) + ": cut-off support [S, s0] must lie inside the grid");
    }
    const auto nodes = grid.nodes();
    const auto inside = std::count_if(nodes.begin(), nodes.end(),
                                      [&](double s) { return s >= spec.S && s <= spec.s0; });
    if (static_cast<std::size_t>(inside) < kMinCutoffNodes) {
        std::ostringstream msg;
        msg << who << ": only " << inside << " nodes resolve the cut-off transition [S, s0], need "
            << kMinCutoffNodes;
        throw ResolutionError(msg.str());
    }
}

double weighted_area(const ConformalState& state, const CutoffSpec& spec) {
    require_cutoff_resolution(state.grid(), spec, "weighted_area");
    const Cutoff cutoff(spec);
    return weighted_area(state, [&](double s) { return cutoff.value(s); }, spec.S);
}

}  // namespace logdiff
