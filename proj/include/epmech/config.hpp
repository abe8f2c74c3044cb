#pragma once

#include <string>
#include <variant>
#include <vector>

#include "epmech/model.hpp"

// Batch run configuration: a single JSON document with a strict schema
// (unknown keys rejected, all violations reported at once). Frequencies are
// entered as dimensionless ratios against omega_b and gamma_1, matching the
// normalized axes of the exported data files.

namespace epmech {

enum class RunMode {
    Spectrum2,      // two-mode eigenvalue sweep over j
    Spectrum3,      // pseudo-Hermitian three-mode sweep over j
    Dynamics2,      // two-mode quadrature trajectory
    Dynamics3,      // three-mode quadrature trajectory
    DynamicsFull,   // full four-mode trajectory
    LocateEP,       // root-find one exceptional point
    Preset,         // named figure preset
};

enum class OutputFormat { Csv, Json };

/// Column selection for spectrum sweeps; one figure panel per selection.
enum class ColumnSelection { All, Frequencies, Linewidths };

/// Model family searched by locate_ep mode.
enum class EpModelKind { TwoMode, ThreeMode };

std::string to_string(RunMode m);
std::string to_string(OutputFormat f);
std::string to_string(ColumnSelection c);
std::string to_string(EpModelKind k);

/// Inclusive sweep grid in units of gamma_1.
struct JGrid {
    double lo = 0.0;
    double hi = 1.0;
    int count = 2;
    bool operator==(const JGrid&) const = default;
};

struct RunConfig {
    RunMode mode = RunMode::Preset;
    std::string preset;  // fig2 | fig3 | fig4 | fig5 (Preset mode only)

    double omega_b = 2.0 * 3.14159265358979323846 * 1e7;  // rad/s
    double gamma1_over_omegab = 0.1;
    double gamma2_over_gamma1 = -1.0;
    std::variant<double, JGrid> j_over_gamma1 = 1.0;
    double delta_over_gamma1 = 0.0;

    double t_max_periods = 100.0;
    int samples_per_period = 200;
    std::vector<double> initial_state;  // empty = mode default

    std::string out;  // output path; empty = subcommand default
    OutputFormat format = OutputFormat::Csv;
    ColumnSelection columns = ColumnSelection::All;   // spectrum modes only
    EpModelKind ep_model = EpModelKind::TwoMode;      // locate_ep mode only

    // Full-model extras (DynamicsFull only).
    double kappa_a_over_omegab = 100.0;
    double kappa_m_over_omegab = 100.0;
    double g_a_over_omegab = 1.0;
    double g_m_over_omegab = 1.0;
    double delta_a_over_omegab = 0.0;
    double delta_m_over_omegab = 0.0;
    double omega1_over_omegab = 1.0;
    double omega2_over_omegab = 1.0;

    bool operator==(const RunConfig&) const = default;

    double gamma_1() const { return gamma1_over_omegab * omega_b; }
    double gamma_2() const { return gamma2_over_gamma1 * gamma_1(); }
};

/// Parse and fully validate a config document. Throws ParseError with line
/// context on malformed JSON, ValidationError listing every violated
/// constraint otherwise.
RunConfig parse_config(const std::string& text);

/// Canonical JSON serialization; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

/// Two-mode model at coupling j = ratio * gamma_1.
TwoModeModel two_mode_from_config(const RunConfig& c, double j_ratio);

/// Pseudo-Hermitian three-mode model at j = ratio * gamma_1; omega_2 = omega_b,
/// omega_1 = omega_2 + delta, and the Kittel parameters tied to the
/// pseudo-Hermitian condition (delta_m = omega_1, kappa_m = -gamma_1, g_m = j).
ThreeModeModel three_mode_from_config(const RunConfig& c, double j_ratio);

/// Full four-mode parameters from the *_over_omegab ratios.
PhysicalParams physical_from_config(const RunConfig& c, double j_ratio);

}  // namespace epmech
