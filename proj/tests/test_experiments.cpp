#include "logdiff/experiments.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <stdexcept>

using namespace logdiff;
using doctest::Approx;

TEST_CASE("parallel_for runs every index and rethrows the first failure") {
    std::vector<int> hits(50, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 50);
    std::atomic<int> done{0};
    try {
        parallel_for(10, 3, [&](std::size_t i) {
            ++done;
            if (i == 2 || i == 7) {
                throw std::runtime_error("index " + std::to_string(i));
            }
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "index 2");
    }
    CHECK(done == 10);
}

TEST_CASE("power-law fit") {
    const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * std::pow(v, 0.5));
    }
    const auto [p, c] = fit_power_law(x, y);
    CHECK(p == Approx(0.5));
    CHECK(std::exp(c) == Approx(3.0));
}

TEST_CASE("exhaustion grid spans the cut-off") {
    ExperimentConfig config;
    const auto grid = exhaustion_grid(config, 0.75, 0.99);
    const double S = -std::log(0.99);
    CHECK(grid->s_min() == Approx(config.s_min_fraction * S));
    CHECK(grid->s_max() == Approx(8.0));
    CHECK(grid->size() == config.points);
    CHECK(exhaustion_grid(config, 0.999, 0.9999)->s_max() == Approx(8.0));
    config.s_max = 0.5;
    CHECK(exhaustion_grid(config, 0.75, 0.99)->s_max() == Approx(4.0 * -std::log(0.75)));
}

TEST_CASE("small Q sweep") {
    ExperimentConfig config;
    config.r0 = {0.6, 0.9};
    config.R_fraction = {0.1, 0.9};
    config.gamma = {0.1, 0.4};
    const auto result = run_q_sweep(config, 2);
    CHECK(result.passed);
    CHECK(result.rows == 8);
    CHECK(result.bound_violations == 0);
    CHECK(result.table("q_sweep").rows.size() == 8);
    CHECK_THROWS(result.table("missing"));
    const auto dir = std::filesystem::temp_directory_path() / "logdiff_test_sweep";
    std::filesystem::remove_all(dir);
    write_outputs(dir, result, config.hash());
    CHECK(read_csv_file(dir / "q_sweep.csv").config_hash == config.hash());
    std::filesystem::remove_all(dir);
}

TEST_CASE("boundary layer experiment never fails") {
    ExperimentConfig config;
    config.layer_points = 200;
    config.layer_times = {0.001, 0.01, 0.1};
    const auto result = run_boundary_layer_experiment(config);
    CHECK(result.passed);
    CHECK(result.widths.size() == 3);
    CHECK(result.monotone);
    CHECK(result.exponent > 0.0);
}
