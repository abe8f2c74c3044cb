#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "epmech/config.hpp"
#include "epmech/spectra.hpp"
#include "epmech/sweep.hpp"

// Data-file output: CSV (units comment line, header row, 17 significant
// digits, LF endings) and schema-versioned JSON with arrays of numbers.
// Figure presets expand to explicit RunConfigs and share the run_config path.

namespace epmech {

/// Numeric table with named columns; the common shape of every data file.
struct DataTable {
    std::string kind;           // schema tag, e.g. "branches" or "trajectory"
    std::string units_comment;  // one-line units note for the CSV header
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool truncated = false;     // trajectories only
};

/// Raw-unit tables (rad/s, seconds) for direct exports.
DataTable to_table(const BranchSet& b);
DataTable to_table(const Trajectory& t);

/// Write a table; throws SerializationError on non-finite values and
/// propagates filesystem failures.
void export_table(const DataTable& t, OutputFormat format,
                  const std::filesystem::path& path);

/// Export surface for computed results.
void export_result(const BranchSet& b, OutputFormat format,
                   const std::filesystem::path& path);
void export_result(const Trajectory& t, OutputFormat format,
                   const std::filesystem::path& path);
void export_result(const PhaseReport& r, OutputFormat format,
                   const std::filesystem::path& path);

/// Parse a table back from a JSON export (round-trip checks).
DataTable import_table_json(const std::filesystem::path& path);

struct RunOutput {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> messages;  // human-readable result lines
    std::vector<std::string> errors;    // per-panel failures (partial output kept)
};

/// Execute one config: run the sweep / trajectory / EP search it describes and
/// write its data files under `out_base` (a directory for presets, a file path
/// or directory for single-result modes).
RunOutput run_config(const RunConfig& c, const std::filesystem::path& out_base);

/// Expand a figure preset to its panel configs (sugar over run_config).
struct PresetPanel {
    std::string file_stem;  // e.g. "fig2a"
    RunConfig config;
    // Normalization applied to the exported table.
    std::string comment;
};
std::vector<PresetPanel> preset_panels(const std::string& name);

/// Run a figure preset: one data file per panel plus a manifest recording all
/// parameters, located EPs and the resolved closed-form coefficient.
RunOutput run_preset(const std::string& name, const std::filesystem::path& out_dir,
                     OutputFormat format);

}  // namespace epmech
