#pragma once

#include "logdiff/config.hpp"
#include "logdiff/estimates.hpp"
#include "logdiff/io.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace logdiff {

/// Runs fn(0), ..., fn(count - 1) on at most `jobs` threads. Exceptions are
/// rethrown after all workers finish (the first by index wins).
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Named CSV tables plus the certificate verdict of one experiment.
struct ExperimentOutput {
    std::vector<std::pair<std::string, CsvTable>> tables;
    bool passed = true;
    std::vector<std::string> failures;

    void fail(std::string why);
    const CsvTable& table(const std::string& name) const;
};

/// Writes every table as <dir>/<name>.csv with the config hash.
void write_outputs(const std::filesystem::path& dir, const ExperimentOutput& output, const std::string& config_hash);

/// Grid used for one (r0, R) point: graded from fraction * S to max(s_max, 4 s0).
GridPtr exhaustion_grid(const ExperimentConfig& config, double r0, double R);

struct ExactSuiteResult : ExperimentOutput {
    double bigbang_space_order = 0.0;
    double cusp_space_order = 0.0;
    double bigbang_time_order = 0.0;
    double cusp_time_order = 0.0;
    double flat_residual = 0.0;
};

/// Spatial orders from errors against the closed forms (fine dt); temporal
/// orders from self-differences over the dt ladder on the coarsest grid;
/// FlatDisc held static. Passes with orders 2 +- 0.3, 1 +- 0.2 and the flat
/// residual below the Newton tolerance.
ExactSuiteResult run_exact_solution_suite(const ExperimentConfig& config, unsigned jobs = 1);

struct UniquenessResult : ExperimentOutput {
    bool barrier_ok = true;       ///< every flow passed the lower barrier and 1/U bound
    bool certificates_ok = true;  ///< interior area certificate at every row
    bool monotone_in_R = true;    ///< area difference nonincreasing in R for every pair and time
    bool below_envelope = true;
};

/// Exhaustion flows from flat initial data for every (r0, R); pairs of ramps
/// compared on D_{r0} with the interior area certificate for every gamma.
UniquenessResult run_uniqueness_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct DemonstrationResult {
    double sup_difference = 0.0;    ///< the two largest ramps on D_{r0} at T
    double refinement_error = 0.0;  ///< largest ramp: grid and dt halved, shared nodes on D_{r0}
    bool passed = false;            ///< sup_difference < 10 * refinement_error
};

/// Ramp choice against discretization error on the finest radius of r0.
DemonstrationResult uniqueness_demonstration(const ExperimentConfig& config, double r0, unsigned jobs = 1);

struct QSweepResult : ExperimentOutput {
    std::size_t rows = 0;
    std::size_t bound_violations = 0;
    std::size_t split_violations = 0;
    std::size_t quadrature_failures = 0;
};

QSweepResult run_q_sweep(const ExperimentConfig& config, unsigned jobs = 1);

struct BoundaryLayerResult : ExperimentOutput {
    std::vector<double> times;
    std::vector<double> widths;
    double exponent = 0.0;
    double prefactor = 0.0;
    bool monotone = true;
};

/// Exploratory: width of the region where U differs from e^{-2s} by a factor >= 2,
/// with a least-squares fit width ~ c t^p. Never fails.
BoundaryLayerResult run_boundary_layer_experiment(const ExperimentConfig& config);

/// Least-squares slope and intercept of log y against log x.
std::pair<double, double> fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace logdiff
