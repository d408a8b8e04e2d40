// logdiff: experiments and certificates for the logarithmic fast diffusion equation.
//
// Exit codes: 0 all certificates pass, 2 a certificate fails, 3 infrastructure error.

#include "logdiff/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace logdiff;

namespace {

constexpr int kPass = 0;
constexpr int kCertificateFailure = 2;
constexpr int kInfrastructure = 3;

struct Common {
    std::string config_path;
    std::string out;
    unsigned jobs = 1;
};

void add_common(CLI::App* sub, Common& common, bool config_required = true) {
    auto* opt = sub->add_option("--config", common.config_path, "INI configuration file");
    if (config_required) {
        opt->required();
    }
    sub->add_option("--out", common.out, "output directory (overrides [output] dir)");
    sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const Common& common) {
    ExperimentConfig config = common.config_path.empty() ? ExperimentConfig{} : parse_config(common.config_path);
    if (!common.out.empty()) {
        config.out_dir = common.out;
    }
    return config;
}

int finish(const ExperimentOutput& output, const ExperimentConfig& config, const std::string& name) {
    write_outputs(config.out_dir, output, config.hash());
    for (const auto& [table, _] : output.tables) {
        std::cout << "wrote " << (fs::path(config.out_dir) / (table + ".csv")).string() << '\n';
    }
    for (const auto& f : output.failures) {
        std::cout << "FAIL " << f << '\n';
    }
    std::cout << name << ": " << (output.passed ? "all certificates pass" : "certificate failures") << '\n';
    return output.passed ? kPass : kCertificateFailure;
}

int run_simulate(const ExperimentConfig& config, unsigned jobs) {
    const double r0 = config.r0.front();
    const auto radii = config.radii(r0);
    if (radii.empty()) {
        throw ConfigError({"simulate: no radii (set cutoff.R or cutoff.R_fraction)"});
    }
    const GridPtr grid = exhaustion_grid(config, r0, radii.front());
    const auto result =
        exhaust(sample_model(ModelKind::FlatDisc, grid, 0.0), config.k, config.solver(), config.T, r0, jobs);
    const fs::path dir = fs::path(config.out_dir) / "trajectories";
    for (std::size_t j = 0; j < result.trajectories.size(); ++j) {
        const auto path = write_trajectory(dir, result.trajectories[j], "k" + std::to_string(j), config.hash());
        std::cout << "k = " << config.k[j] << ": " << result.trajectories[j].size() << " snapshots, "
                  << result.trajectories[j].steps_taken << " steps -> " << path.string() << '\n';
    }
    CsvTable diag;
    diag.header = {"k_lo", "k_hi", "min_log_increment", "sup_difference"};
    for (std::size_t j = 0; j + 1 < config.k.size(); ++j) {
        diag.add_row({format_double(config.k[j]), format_double(config.k[j + 1]),
                      format_double(result.diagnostics.min_log_increment[j]),
                      format_double(result.diagnostics.sup_difference[j])});
    }
    write_csv_file(fs::path(config.out_dir) / "exhaustion.csv", diag, config.hash());
    std::cout << "ordering in k: " << (result.diagnostics.monotone ? "ok" : "VIOLATED") << '\n';
    return result.diagnostics.monotone ? kPass : kCertificateFailure;
}

int run_verify(const ExperimentConfig& config, const std::string& g_path, const std::string& G_path) {
    const Trajectory g = read_trajectory(g_path);
    const Trajectory G = read_trajectory(G_path);
    EstimateReport report;
    report.append(lower_barrier_check(g));
    report.append(lower_barrier_check(G));
    for (const auto* flow : {&g, &G}) {
        for (const auto& st : flow->states()) {
            if (st.time() > 0.0) {
                report.append(pointwise_u_inverse_bound(*flow, st.time()));
            }
        }
    }
    bool ordered = true;
    for (std::size_t k = 0; k < g.size(); ++k) {
        ordered = ordered && min_log_gap(g[k], G[k]) >= -kOrderTolerance;
    }
    for (double r0 : config.r0) {
        for (double R : config.radii(r0)) {
            for (double gamma : config.gamma) {
                if (ordered) {
                    report.append(main_odi_check(g, G, CutoffSpec::make(r0, R, gamma)));
                    report.append(interior_area_verify(g, G, r0, R, gamma));
                } else {
                    report.append(volume_excess_verify(g, G, r0, R, gamma));
                }
            }
        }
    }
    const bool passed = report.passed(1e-8);
    const auto curvature = curvature_monotonicity_check(G);
    if (!curvature.precondition_ok) {
        std::cout << "note: " << curvature.note << '\n';
    }
    report.rows.insert(report.rows.end(), curvature.rows.begin(), curvature.rows.end());

    const fs::path path = fs::path(config.out_dir) / "estimates.csv";
    write_csv_file(path, estimate_csv(report), config.hash());
    write_csv_file(fs::path(config.out_dir) / "constants.csv", constants_csv(constants_table(config.gamma)),
                   config.hash());
    std::cout << "wrote " << path.string() << " (" << report.rows.size() << " rows, pair "
              << (ordered ? "ordered" : "crossing") << ")\n";
    if (!report.note.empty()) {
        std::cout << "note: " << report.note << '\n';
    }
    std::cout << "verify: " << (passed ? "all certificates pass" : "certificate failures") << '\n';
    return passed ? kPass : kCertificateFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logarithmic fast diffusion lab: simulate flows on the disc and certify the uniqueness estimates"};
    app.require_subcommand(1);

    Common common;
    auto* exact = app.add_subcommand("exact-suite", "convergence study against the exact solutions");
    auto* uniq = app.add_subcommand("uniqueness", "exhaustion pairs, interior area certificates, ramp vs grid");
    auto* qsweep = app.add_subcommand("q-sweep", "Q, Q1, Q2 against the analytic bound");
    auto* layer = app.add_subcommand("boundary-layer", "exploratory width of the boundary layer");
    auto* verify = app.add_subcommand("verify", "run the estimates on two stored trajectories");
    auto* simulate = app.add_subcommand("simulate", "evolve the exhaustion family and store trajectories");
    for (auto* sub : {exact, uniq, qsweep, layer, simulate}) {
        add_common(sub, common);
    }
    add_common(verify, common);
    std::string g_path, G_path;
    verify->add_option("--g", g_path, "manifest of the lower flow g")->required();
    verify->add_option("--G", G_path, "manifest of the upper flow G")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInfrastructure;
    }

    try {
        const ExperimentConfig config = load(common);
        if (*exact) {
            return finish(run_exact_solution_suite(config, common.jobs), config, "exact-suite");
        }
        if (*uniq) {
            return finish(run_uniqueness_experiment(config, common.jobs), config, "uniqueness");
        }
        if (*qsweep) {
            return finish(run_q_sweep(config, common.jobs), config, "q-sweep");
        }
        if (*layer) {
            const auto result = run_boundary_layer_experiment(config);
            finish(result, config, "boundary-layer");
            std::cout << "fitted exponent p = " << result.exponent << " (exploratory, expected near 1/2)\n";
            return kPass;
        }
        if (*simulate) {
            return run_simulate(config, common.jobs);
        }
        if (*verify) {
            return run_verify(config, g_path, G_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kInfrastructure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInfrastructure;
    }
    return kInfrastructure;
}
