#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "epmech/errors.hpp"

// Parameter types for the linearized magno-optomechanical system, the two
// adiabatic-elimination reductions, and the real quadrature dynamics matrices.
// All frequencies and rates are angular (rad/s); a negative decay rate means
// gain. All types are immutable value objects once validated and every
// operation is a pure function, so everything here is safe to share across
// threads.

namespace epmech {

/// Relative tolerance on |omega_1 - omega_2| for the degenerate two-mode reduction.
inline constexpr double kDegeneracyTol = 1e-9;

/// Adiabatic elimination is considered trustworthy for |kappa| >= 10 * G.
inline constexpr double kAdiabaticRatioMin = 10.0;

/// Floor factor (times omega_b) used to normalize residuals when gamma_1 = 0.
inline constexpr double kResidualFloorFactor = 1e-12;

/// Full four-mode system: cavity (a), Kittel mode (m), mechanical modes b1, b2.
struct PhysicalParams {
    double delta_a = 0.0;   // cavity detuning
    double delta_m = 0.0;   // Kittel detuning
    double kappa_a = 0.0;   // cavity decay rate (>0 loss, <0 gain)
    double kappa_m = 0.0;   // Kittel decay rate
    double g_a_lin = 0.0;   // cavity <-> b1 linearized coupling, >= 0
    double g_m_lin = 0.0;   // Kittel <-> b2 linearized coupling, >= 0
    double omega_1 = 0.0;   // b1 frequency
    double omega_2 = 0.0;   // b2 frequency
    double j = 0.0;         // b1 <-> b2 coupling, >= 0

    /// Throws InvalidModelError unless all fields are finite and couplings nonnegative.
    void validate() const;
};

/// Effective mechanical pair after eliminating both the cavity and the Kittel
/// mode: H = [[omega_b - i*gamma_1, j], [j, omega_b - i*gamma_2]].
struct TwoModeModel {
    double omega_b = 0.0;   // common mechanical frequency
    double gamma_1 = 0.0;   // effective decay of b1 (>0 loss, <0 gain)
    double gamma_2 = 0.0;   // effective decay of b2
    double j = 0.0;         // mechanical coupling, >= 0

    double gamma_plus() const { return (gamma_1 + gamma_2) / 2.0; }
    double gamma_minus() const { return (gamma_1 - gamma_2) / 2.0; }

    void validate() const;
};

/// Effective three-mode system (m, b1, b2) after eliminating only the cavity.
struct ThreeModeModel {
    double delta_m = 0.0;   // Kittel detuning
    double kappa_m = 0.0;   // Kittel decay rate
    double g_m_lin = 0.0;   // Kittel <-> b2 coupling, >= 0
    double omega_1 = 0.0;   // b1 frequency
    double gamma_1 = 0.0;   // effective decay of b1
    double omega_2 = 0.0;   // b2 frequency
    double j = 0.0;         // mechanical coupling, >= 0

    /// Mechanical splitting omega_1 - omega_2, always recomputed.
    double delta() const { return omega_1 - omega_2; }

    void validate() const;
};

enum class SymmetryClass {
    PTSymmetric,
    PurelyDissipative,
    PseudoHermitian,
    Unclassified,
};

std::string to_string(SymmetryClass s);

/// Real first-order system d/dt x = A x over quadratures q_k = Re sqrt(2) <b_k>,
/// p_k = Im sqrt(2) <b_k>, ordered (q1, p1, q2, p2[, qm, pm[, qa, pa]]).
struct DynamicsMatrix {
    Eigen::MatrixXd entries;
    std::vector<std::string> labels;

    int dimension() const { return static_cast<int>(entries.rows()); }
    void validate() const;  // dimension in {4, 6, 8}, finite, labels match
};

/// Effective decay rates (gamma_1, gamma_2) = (G_a^2 / kappa_a, G_m^2 / kappa_m).
/// Throws ZeroDenominatorError if either kappa vanishes.
std::pair<double, double> effective_rates(const PhysicalParams& p);

/// Eliminate cavity and Kittel modes. Requires omega_1 = omega_2 within
/// kDegeneracyTol (relative); throws NondegenerateModesError otherwise.
TwoModeModel reduce_to_two_mode(const PhysicalParams& p);

/// Eliminate the cavity mode only. Throws ZeroDenominatorError if kappa_a = 0.
ThreeModeModel reduce_to_three_mode(const PhysicalParams& p);

/// True when |kappa| >= 10 G for every mode the reduction eliminates.
bool two_mode_reduction_valid(const PhysicalParams& p);
bool three_mode_reduction_valid(const PhysicalParams& p);

struct PseudoHermitianReport {
    bool satisfied = false;
    // |gamma_1 + kappa_m|, |delta_m - omega_1|, |g_m - j|, each normalized by
    // max(|gamma_1|, 1e-12 * max(|omega_1|, |omega_2|)).
    std::array<double, 3> residuals{};
};

/// Checks the balanced-gain, red-sideband, equal-coupling condition under
/// which the three-mode spectrum is real or conjugate-paired.
PseudoHermitianReport check_pseudo_hermitian(const ThreeModeModel& m, double tol);

/// Quadrature equation-of-motion matrices. The complex mode equations
/// db/dt = -i H b map to d/dt (q, p) with q' rows carrying +omega p terms and
/// p' rows carrying -omega q terms; decay rates appear on the diagonal.
DynamicsMatrix dynamics_matrix(const TwoModeModel& m);
DynamicsMatrix dynamics_matrix(const ThreeModeModel& m);
DynamicsMatrix dynamics_matrix(const PhysicalParams& p);

/// Non-Hermitian mode-space Hamiltonians generating db/dt = -i H b.
Eigen::Matrix2cd mode_hamiltonian(const TwoModeModel& m);
Eigen::Matrix3cd mode_hamiltonian(const ThreeModeModel& m);   // order (m, b1, b2)
Eigen::Matrix4cd mode_hamiltonian(const PhysicalParams& p);   // order (b1, b2, m, a)

/// Symmetry class of a two-mode model: PT for gamma_2 = -gamma_1 (balanced
/// gain-loss), purely dissipative when both rates are >= 0.
SymmetryClass infer_symmetry(const TwoModeModel& m, double tol = 1e-9);
SymmetryClass infer_symmetry(const ThreeModeModel& m, double tol = 1e-9);

}  // namespace epmech
