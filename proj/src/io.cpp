#include "logdiff/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace logdiff {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string() + " for reading");
    }
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_double(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw std::runtime_error(where + ": cannot parse number '" + text + "'");
    }
    return value;
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) {
        throw SizeError("CsvTable::add_row: cell count does not match the header");
    }
    rows.push_back(std::move(row));
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

void write_csv(std::ostream& out, const CsvTable& table, std::string_view config_hash) {
    out << "# config_hash=" << config_hash << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) {
        line(row);
    }
}

void write_csv_file(const fs::path& path, const CsvTable& table, std::string_view config_hash) {
    auto out = open_out(path);
    write_csv(out, table, config_hash);
}

CsvFile read_csv_file(const fs::path& path) {
    auto in = open_in(path);
    CsvFile file;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.rfind("# config_hash=", 0) == 0) {
            file.config_hash = line.substr(14);
            continue;
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!have_header) {
            file.table.header = split_line(line);
            have_header = true;
        } else {
            file.table.add_row(split_line(line));
        }
    }
    return file;
}

// ---------------------------------------------------------------------------
// Snapshots

void write_snapshot(std::ostream& out, const ConformalState& state) {
    out << "# logdiff-state t=" << format_double(state.time()) << " n=" << state.size() << '\n';
    const auto& grid = state.grid();
    for (std::size_t i = 0; i < state.size(); ++i) {
        out << format_double(grid[i]) << ',' << format_double(state[i]) << '\n';
    }
}

void write_snapshot_file(const fs::path& path, const ConformalState& state) {
    auto out = open_out(path);
    write_snapshot(out, state);
}

ConformalState read_snapshot(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("# logdiff-state ", 0) != 0) {
        throw std::runtime_error("snapshot: missing '# logdiff-state' header");
    }
    double t = 0.0;
    std::size_t n = 0;
    {
        std::istringstream fields(header.substr(16));
        std::string field;
        bool have_t = false, have_n = false;
        while (fields >> field) {
            if (field.rfind("t=", 0) == 0) {
                t = parse_double(field.substr(2), "snapshot header");
                have_t = true;
            } else if (field.rfind("n=", 0) == 0) {
                n = static_cast<std::size_t>(parse_double(field.substr(2), "snapshot header"));
                have_n = true;
            }
        }
        if (!have_t || !have_n) {
            throw std::runtime_error("snapshot: header needs t= and n=");
        }
    }
    std::vector<double> s, u;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split_line(line);
        if (cells.size() != 2) {
            throw std::runtime_error("snapshot: expected 's,U' on line " + std::to_string(s.size() + 2));
        }
        s.push_back(parse_double(cells[0], "snapshot"));
        u.push_back(parse_double(cells[1], "snapshot"));
    }
    if (s.size() != n) {
        throw std::runtime_error("snapshot: header announces " + std::to_string(n) + " nodes, found " +
                                 std::to_string(s.size()));
    }
    return ConformalState(make_grid(LogPolarGrid(std::move(s))), std::move(u), t);
}

ConformalState read_snapshot_file(const fs::path& path) {
    auto in = open_in(path);
    return read_snapshot(in);
}

fs::path write_trajectory(const fs::path& dir, const Trajectory& trajectory, const std::string& stem,
                          std::string_view config_hash) {
    fs::create_directories(dir);
    CsvTable manifest;
    manifest.header = {"time", "snapshot"};
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const std::string name = stem + "_" + std::to_string(k) + ".state";
        write_snapshot_file(dir / name, trajectory[k]);
        manifest.add_row({format_double(trajectory[k].time()), name});
    }
    const fs::path path = dir / (stem + "_manifest.csv");
    write_csv_file(path, manifest, config_hash);
    return path;
}

Trajectory read_trajectory(const fs::path& manifest) {
    const CsvFile file = read_csv_file(manifest);
    if (file.table.header != std::vector<std::string>{"time", "snapshot"}) {
        throw std::runtime_error("manifest " + manifest.string() + ": expected columns time,snapshot");
    }
    if (file.table.rows.empty()) {
        throw std::runtime_error("manifest " + manifest.string() + ": no snapshots");
    }
    const fs::path base = manifest.parent_path();
    GridPtr grid;
    std::optional<Trajectory> trajectory;
    for (const auto& row : file.table.rows) {
        ConformalState loaded = read_snapshot_file(base / row[1]);
        if (!grid) {
            grid = loaded.grid_ptr();
            trajectory.emplace(grid, manifest.stem().string());
        } else if (!(loaded.grid() == *grid)) {
            throw IncompatibleError("manifest " + manifest.string() + ": snapshots use different grids");
        }
        std::vector<double> values(loaded.values().begin(), loaded.values().end());
        trajectory->append(ConformalState(grid, std::move(values), loaded.time()));
    }
    return std::move(*trajectory);
}

}  // namespace logdiff
