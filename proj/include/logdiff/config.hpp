#pragma once

#include "logdiff/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace logdiff {

/// Parameters of one experiment run, read from an INI file with the sections
/// [experiment], [grid], [cutoff], [ramps], [time], [exact], [boundary_layer], [output].
struct ExperimentConfig {
    // [experiment]
    std::string id = "experiment";
    std::uint64_t seed = 0;  ///< reserved; no numerics depend on it

    // [grid] for the exhaustion experiments
    std::size_t points = 400;
    double ratio = 1.02;
    double s_min_fraction = 0.25;  ///< s_min = fraction * S
    double s_max = 8.0;            ///< grid ends at max(s_max, 4 s0)

    // [cutoff]
    std::vector<double> r0 = {0.75};
    std::vector<double> R;           ///< explicit radii, valid for every r0
    std::vector<double> R_fraction;  ///< R = r0^{1/3} + f (1 - r0^{1/3}), f in (0, 1)
    std::vector<double> gamma = {0.25};

    // [ramps]
    std::vector<double> k = {100.0, 1000.0, 10000.0};

    // [time]
    double T = 0.1;
    std::vector<double> samples = {0.025, 0.05, 0.075};
    double dt = 1e-6;
    double dt_max = 1e-3;
    double dt_growth = 1.05;
    double newton_tol = 1e-10;

    // [exact]
    double exact_s_min = 0.1;
    double exact_s_max = 3.0;
    std::vector<std::size_t> exact_points = {81, 161, 321};
    std::vector<double> exact_dts = {0.02, 0.01, 0.005};
    double exact_t0 = 0.1;
    double exact_T = 0.5;
    double exact_fine_dt = 1e-4;

    // [boundary_layer]
    double layer_k = 1e4;
    double layer_s_min = 0.01;
    std::size_t layer_points = 600;
    std::vector<double> layer_times = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};

    // [output]
    std::string out_dir = "out";

    bool operator==(const ExperimentConfig&) const = default;

    /// Radii for one r0: the explicit list followed by the fractional ones, sorted.
    std::vector<double> radii(double r0_value) const;
    SolverConfig solver() const;
    /// FNV-1a 64 of the canonical INI text, as 16 hex digits.
    std::string hash() const;
};

/// Throws ConfigError listing unknown keys, malformed values and violated ranges.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical INI text; parse_config_text(write_config(c)) == c.
std::string write_config(const ExperimentConfig& config);

/// Range problems of an in-memory config (empty when valid).
std::vector<std::string> validate_config(const ExperimentConfig& config);

}  // namespace logdiff
