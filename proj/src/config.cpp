#include "logdiff/config.hpp"

#include "logdiff/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace logdiff {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::vector<std::string>& problems) : tree_(tree), problems_(problems) {}

    void str(const char* key, std::string& out) {
        if (auto v = get(key)) {
            out = *v;
        }
    }

    void number(const char* key, double& out) {
        if (auto v = get(key)) {
            parse(key, *v, out);
        }
    }

    template <class Int>
    void integer(const char* key, Int& out) {
        if (auto v = get(key)) {
            double d = 0.0;
            if (parse(key, *v, d)) {
                if (d < 0 || d != std::floor(d)) {
                    problems_.push_back(std::string(key) + ": expected a nonnegative integer, got '" + *v + "'");
                } else {
                    out = static_cast<Int>(d);
                }
            }
        }
    }

    template <class T>
    void list(const char* key, std::vector<T>& out) {
        auto v = get(key);
        if (!v) {
            return;
        }
        if (v->empty()) {
            out.clear();
            return;
        }
        std::vector<T> items;
        std::istringstream in(*v);
        std::string cell;
        bool ok = true;
        while (std::getline(in, cell, ',')) {
            double d = 0.0;
            ok = parse(key, trim(cell), d) && ok;
            if constexpr (std::is_integral_v<T>) {
                if (d < 0 || d != std::floor(d)) {
                    problems_.push_back(std::string(key) + ": expected nonnegative integers");
                    ok = false;
                }
            }
            items.push_back(static_cast<T>(d));
        }
        if (ok) {
            out = std::move(items);
        }
    }

    std::set<std::string> used;

private:
    std::optional<std::string> get(const char* key) {
        used.insert(key);
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) {
            return trim(*v);
        }
        return std::nullopt;
    }

    bool parse(const char* key, const std::string& text, double& out) {
        std::size_t used_chars = 0;
        try {
            const double d = std::stod(text, &used_chars);
            if (used_chars == text.size()) {
                out = d;
                return true;
            }
        } catch (const std::exception&) {
        }
        problems_.push_back(std::string(key) + ": cannot parse '" + text + "' as a number");
        return false;
    }

    const pt::ptree& tree_;
    std::vector<std::string>& problems_;
};

std::string show(double x) {
    std::ostringstream out;
    out << x;
    return out.str();
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? ", " : "") + format_double(xs[i]);
    }
    return out;
}

std::string join(const std::vector<std::size_t>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? ", " : "") + std::to_string(xs[i]);
    }
    return out;
}

}  // namespace

std::vector<double> ExperimentConfig::radii(double r0_value) const {
    std::vector<double> out = R;
    const double lower = std::cbrt(r0_value);
    for (double f : R_fraction) {
        out.push_back(lower + f * (1.0 - lower));
    }
    std::sort(out.begin(), out.end());
    return out;
}

SolverConfig ExperimentConfig::solver() const {
    SolverConfig c;
    c.dt = dt;
    c.dt_max = dt_max;
    c.dt_growth = dt_growth;
    c.newton_tol = newton_tol;
    c.sample_times = samples;
    return c;
}

std::string ExperimentConfig::hash() const {
    return hex64(fnv1a64(write_config(*this)));
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& message) {
        if (!ok) {
            problems.push_back(message);
        }
    };
    require(!c.id.empty(), "experiment.id must not be empty");
    require(c.points >= 3, "grid.points must be >= 3");
    require(c.ratio >= 1.0, "grid.ratio must be >= 1");
    require(c.s_min_fraction > 0.0 && c.s_min_fraction < 1.0, "grid.s_min_fraction must lie in (0, 1)");
    require(c.s_max > 0.0, "grid.s_max must be positive");

    require(!c.r0.empty(), "cutoff.r0 needs at least one value");
    for (double r0 : c.r0) {
        require(r0 > 0.5 && r0 < 1.0, "cutoff.r0 = " + show(r0) + " violates r0 in (1/2, 1)");
    }
    for (double g : c.gamma) {
        require(g > 0.0 && g < 0.5, "cutoff.gamma = " + show(g) + " violates gamma in (0, 1/2)");
    }
    require(!c.gamma.empty(), "cutoff.gamma needs at least one value");
    for (double f : c.R_fraction) {
        require(f > 0.0 && f < 1.0, "cutoff.R_fraction = " + show(f) + " must lie in (0, 1)");
    }
    for (double r0 : c.r0) {
        if (!(r0 > 0.5 && r0 < 1.0)) {
            continue;
        }
        for (double R : c.R) {
            if (auto p = CutoffSpec::validate(r0, R, 0.25); !p.empty()) {
                problems.push_back("cutoff.R: " + p + " (r0 = " + show(r0) + ")");
            }
        }
    }

    require(!c.k.empty(), "ramps.k needs at least one value");
    for (std::size_t i = 0; i < c.k.size(); ++i) {
        require(c.k[i] >= 1.0, "ramps.k = " + show(c.k[i]) +
                                   " must be >= 1 (ramps are measured in units of the big-bang rate)");
        require(i == 0 || c.k[i] >= c.k[i - 1], "ramps.k must be nondecreasing");
    }

    require(c.T > 0.0, "time.T must be positive");
    for (double t : c.samples) {
        require(t > 0.0 && t < c.T, "time.samples = " + show(t) + " must lie in (0, T)");
    }
    if (auto p = c.solver().validate(); !p.empty()) {
        problems.push_back("time: " + p);
    }

    require(c.exact_s_min > 0.0 && c.exact_s_max > c.exact_s_min, "exact: need 0 < s_min < s_max");
    require(c.exact_points.size() >= 3, "exact.points needs at least 3 refinements");
    require(c.exact_dts.size() >= 3, "exact.dts needs at least 3 refinements");
    for (auto n : c.exact_points) {
        require(n >= 3, "exact.points must be >= 3");
    }
    for (double d : c.exact_dts) {
        require(d > 0.0, "exact.dts must be positive");
    }
    require(c.exact_t0 > 0.0 && c.exact_T > c.exact_t0, "exact: need 0 < t0 < T");
    require(c.exact_fine_dt > 0.0, "exact.fine_dt must be positive");

    require(c.layer_k >= 1.0, "boundary_layer.k must be >= 1");
    require(c.layer_s_min > 0.0 && c.layer_s_min < c.s_max, "boundary_layer.s_min must lie in (0, grid.s_max)");
    require(c.layer_points >= 3, "boundary_layer.points must be >= 3");
    for (std::size_t i = 0; i < c.layer_times.size(); ++i) {
        require(c.layer_times[i] > 0.0, "boundary_layer.times must be positive");
        require(i == 0 || c.layer_times[i] > c.layer_times[i - 1], "boundary_layer.times must increase");
    }
    require(!c.layer_times.empty(), "boundary_layer.times needs at least one value");
    require(!c.out_dir.empty(), "output.dir must not be empty");
    return problems;
}

ExperimentConfig parse_config_text(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({std::string("malformed INI: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }

    std::vector<std::string> problems;
    ExperimentConfig c;
    Reader r(tree, problems);
    r.str("experiment.id", c.id);
    r.integer("experiment.seed", c.seed);
    r.integer("grid.points", c.points);
    r.number("grid.ratio", c.ratio);
    r.number("grid.s_min_fraction", c.s_min_fraction);
    r.number("grid.s_max", c.s_max);
    r.list("cutoff.r0", c.r0);
    r.list("cutoff.R", c.R);
    r.list("cutoff.R_fraction", c.R_fraction);
    r.list("cutoff.gamma", c.gamma);
    r.list("ramps.k", c.k);
    r.number("time.T", c.T);
    r.list("time.samples", c.samples);
    r.number("time.dt", c.dt);
    r.number("time.dt_max", c.dt_max);
    r.number("time.dt_growth", c.dt_growth);
    r.number("time.newton_tol", c.newton_tol);
    r.number("exact.s_min", c.exact_s_min);
    r.number("exact.s_max", c.exact_s_max);
    r.list("exact.points", c.exact_points);
    r.list("exact.dts", c.exact_dts);
    r.number("exact.t0", c.exact_t0);
    r.number("exact.T", c.exact_T);
    r.number("exact.fine_dt", c.exact_fine_dt);
    r.number("boundary_layer.k", c.layer_k);
    r.number("boundary_layer.s_min", c.layer_s_min);
    r.integer("boundary_layer.points", c.layer_points);
    r.list("boundary_layer.times", c.layer_times);
    r.str("output.dir", c.out_dir);

    std::vector<std::string> unknown;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            unknown.push_back(section + " (keys must live in a section)");
            continue;
        }
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            if (!r.used.contains(full)) {
                unknown.push_back(full);
            }
        }
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& u : unknown) {
            list += (list.empty() ? "" : ", ") + u;
        }
        problems.insert(problems.begin(), "unknown keys: " + list);
    }
    for (auto& p : validate_config(c)) {
        problems.push_back(std::move(p));
    }
    if (!problems.empty()) {
        throw ConfigError(std::move(problems));
    }
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"cannot read config file " + path.string()});
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string write_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[experiment]\n"
        << "id = " << c.id << "\n"
        << "seed = " << c.seed << "\n\n"
        << "[grid]\n"
        << "points = " << c.points << "\n"
        << "ratio = " << format_double(c.ratio) << "\n"
        << "s_min_fraction = " << format_double(c.s_min_fraction) << "\n"
        << "s_max = " << format_double(c.s_max) << "\n\n"
        << "[cutoff]\n"
        << "r0 = " << join(c.r0) << "\n"
        << "R = " << join(c.R) << "\n"
        << "R_fraction = " << join(c.R_fraction) << "\n"
        << "gamma = " << join(c.gamma) << "\n\n"
        << "[ramps]\n"
        << "k = " << join(c.k) << "\n\n"
        << "[time]\n"
        << "T = " << format_double(c.T) << "\n"
        << "samples = " << join(c.samples) << "\n"
        << "dt = " << format_double(c.dt) << "\n"
        << "dt_max = " << format_double(c.dt_max) << "\n"
        << "dt_growth = " << format_double(c.dt_growth) << "\n"
        << "newton_tol = " << format_double(c.newton_tol) << "\n\n"
        << "[exact]\n"
        << "s_min = " << format_double(c.exact_s_min) << "\n"
        << "s_max = " << format_double(c.exact_s_max) << "\n"
        << "points = " << join(c.exact_points) << "\n"
        << "dts = " << join(c.exact_dts) << "\n"
        << "t0 = " << format_double(c.exact_t0) << "\n"
        << "T = " << format_double(c.exact_T) << "\n"
        << "fine_dt = " << format_double(c.exact_fine_dt) << "\n\n"
        << "[boundary_layer]\n"
        << "k = " << format_double(c.layer_k) << "\n"
        << "s_min = " << format_double(c.layer_s_min) << "\n"
        << "points = " << c.layer_points << "\n"
        << "times = " << join(c.layer_times) << "\n\n"
        << "[output]\n"
        << "dir = " << c.out_dir << "\n";
    return out.str();
}

}  // namespace logdiff
