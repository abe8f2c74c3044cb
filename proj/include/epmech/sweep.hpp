#pragma once

#include <string>
#include <variant>
#include <vector>

#include "epmech/dynamics.hpp"
#include "epmech/model.hpp"
#include "epmech/spectra.hpp"

// Spectra over parameter grids with branch continuation, and batched dynamics
// runs. Grid points and batch items are independent pure evaluations; batch
// items may run on several workers but results always come back in input order.

namespace epmech {

struct SweepSpec {
    std::variant<TwoModeModel, ThreeModeModel> base_model;
    std::string param = "j";
    std::vector<double> values;  // strictly increasing
    SymmetryClass symmetry = SymmetryClass::Unclassified;
};

struct EpHit {
    double param_value = 0.0;
    int ep_order = 2;
};

struct BranchSet {
    std::vector<double> param_values;  // final grid, refinement points included
    // branches[b][i] = eigenvalue of branch b at param_values[i]
    std::vector<std::vector<ComplexEigenvalue>> branches;
    std::vector<PhaseReport> phase_labels;
    std::vector<EpHit> ep_hits;
    // Reported continuity constant: max |d lambda| / |d param| over branches.
    double continuity_bound = 0.0;
    // Grid indices where the branch assignment was ambiguous (at EPs).
    std::vector<std::size_t> ambiguous_points;
};

/// Spectra at every grid point with nearest-neighbor branch continuation
/// (minimal total complex distance over permutations). Coalescence dips are
/// refined (10 extra points per round, up to 3 rounds) and handed to locate_ep;
/// near-tied assignments set the ambiguity flag and keep the previous ordering.
BranchSet run_sweep(const SweepSpec& spec);

struct BatchItem {
    DynamicsMatrix matrix;
    InitialState state;
};

struct BatchResult {
    bool ok = false;
    std::string error;  // set when ok is false
    Trajectory trajectory;
    std::vector<EnvelopeFit> fits;  // one per mechanical quadrature (q1, q2)
};

/// Integrate every item and fit the mechanical envelopes. Per-item failures are
/// collected, never thrown. The worker count honors the EPMECH_WORKERS
/// environment variable; output order equals input order regardless.
std::vector<BatchResult> run_dynamics_batch(const std::vector<BatchItem>& items,
                                            double t_max, double dt);

}  // namespace epmech
