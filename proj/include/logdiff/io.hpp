#pragma once

#include "logdiff/conformal.hpp"
#include "logdiff/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace logdiff {

/// Header plus string cells; numbers are formatted by format_double.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws SizeError when the cell count does not match the header.
    void add_row(std::vector<std::string> row);
};

/// Shortest form that round-trips (%.17g).
std::string format_double(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

/// `# config_hash=<hash>`, the header row, then the rows.
void write_csv(std::ostream& out, const CsvTable& table, std::string_view config_hash);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table, std::string_view config_hash);

struct CsvFile {
    std::string config_hash;
    CsvTable table;
};

CsvFile read_csv_file(const std::filesystem::path& path);

/// `# logdiff-state t=<time> n=<N>` followed by `s_i,U_i` lines.
void write_snapshot(std::ostream& out, const ConformalState& state);
void write_snapshot_file(const std::filesystem::path& path, const ConformalState& state);

/// Parses a snapshot; the returned state owns a fresh grid built from the s column.
ConformalState read_snapshot(std::istream& in);
ConformalState read_snapshot_file(const std::filesystem::path& path);

/// Writes <stem>_<index>.state per snapshot plus <stem>_manifest.csv with
/// columns time,snapshot (paths relative to dir). Returns the manifest path.
std::filesystem::path write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory,
                                       const std::string& stem, std::string_view config_hash);

/// Loads a trajectory from its manifest. All snapshots must share one grid.
Trajectory read_trajectory(const std::filesystem::path& manifest);

}  // namespace logdiff
