#pragma once

#include "logdiff/flux.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace logdiff {

/// s = -log r for r in (0, 1).
double s_from_r(double r);
/// r = exp(-s) for s > 0.
double r_from_s(double s);

/// Conformal factor 1/sinh^2 s of the Poincare metric in log-polar coordinates.
double hyperbolic_factor(double s);

/// Strictly increasing positive nodes s_0 < ... < s_{N-1}, N >= 3.
class LogPolarGrid {
public:
    explicit LogPolarGrid(std::vector<double> nodes, std::optional<double> grading = std::nullopt);

    static LogPolarGrid uniform(double s_min, double s_max, std::size_t count);
    /// Cells grow geometrically away from s_min: h_{i+1} = ratio * h_i.
    static LogPolarGrid graded(double s_min, double s_max, std::size_t count, double ratio = 1.05);

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double s_min() const noexcept { return nodes_.front(); }
    double s_max() const noexcept { return nodes_.back(); }
    std::optional<double> grading() const noexcept { return grading_; }

    /// Every cell halved. Graded grids stay geometric (ratio -> sqrt(ratio)), so
    /// node i of this grid is node 2i of the refined one.
    LogPolarGrid refined() const;

    bool operator==(const LogPolarGrid& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
    std::optional<double> grading_;
};

using GridPtr = std::shared_ptr<const LogPolarGrid>;

GridPtr make_grid(LogPolarGrid grid);

/// Radial conformal factor U > 0 on a log-polar grid at flow time t >= 0.
/// Immutable; the grid is shared between states.
class ConformalState {
public:
    ConformalState(GridPtr grid, std::vector<double> values, double time);

    const LogPolarGrid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double time() const noexcept { return time_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
    double time_;
};

enum class ModelKind { BigBang, Cusp, FlatDisc, Poincare };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
bool is_time_dependent(ModelKind kind);

/// BigBang 2t/sinh^2 s, Cusp 2t/s^2, FlatDisc e^{-2s}, Poincare 1/sinh^2 s.
/// FlatDisc accepts s = 0 (value 1); the others need s > 0.
double model_factor(ModelKind kind, double s, double t);

ConformalState sample_model(ModelKind kind, const GridPtr& grid, double t);

/// K = -(log U)'' / (2U) at interior nodes (N - 2 values, endpoints excluded).
std::vector<double> gauss_curvature(const ConformalState& state);

/// Second difference of nodal data on a nonuniform grid at interior node i.
double second_difference(std::span<const double> s, std::span<const double> w, std::size_t i);

/// 2*pi times the trapezoid integral of U over [s_lo, s_hi].
double annulus_area(const ConformalState& state, double s_lo, double s_hi);

/// Area 2*pi*U(s_max)/2 of the unresolved centre, exact for U proportional to e^{-2s}.
double centre_tail_area(const ConformalState& state);

/// Area of D_{r0}: annulus from s(r0) to s_max plus the centre tail.
double disc_area(const ConformalState& state, double r0);

/// 2*pi * int_{s_from}^{s_max} y * weight over nodal data y, linear between nodes.
/// With include_tail the centre tail 2*pi*y(s_max)/2 * weight(s_max) is added.
double weighted_integral(const LogPolarGrid& grid, std::span<const double> values,
                         const std::function<double(double)>& weight, double s_from,
                         bool include_tail);

/// 2*pi * int_{s_from}^{s_max} U * weight + tail, with weight = 1 assumed beyond s_max.
double weighted_area(const ConformalState& state, const std::function<double(double)>& weight,
                     double s_from);

/// Minimum number of nodes required inside the transition [S, s0] of a cut-off.
inline constexpr std::size_t kMinCutoffNodes = 16;

/// Throws ResolutionError unless kMinCutoffNodes nodes fall in [S, s0] and s0 <= s_max.
void require_cutoff_resolution(const LogPolarGrid& grid, const CutoffSpec& spec, const char* who);

/// Weighted area with the flux cut-off of spec. Throws ResolutionError when
/// fewer than kMinCutoffNodes nodes fall in [S, s0] or s0 > s_max.
double weighted_area(const ConformalState& state, const CutoffSpec& spec);

}  // namespace logdiff
