#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include "epmech/model.hpp"

// Complex eigenvalue spectra of the effective non-Hermitian Hamiltonians,
// closed-form and numeric, plus phase classification and exceptional-point
// location. Pure functions on immutable inputs.

namespace epmech {

using Complex = std::complex<double>;

/// Coalescence and frequency tolerances, relative to the spectral scale.
inline constexpr double kEpTolRel = 1e-8;
inline constexpr double kFreqTolRel = 1e-8;

/// One supermode: lambda = frequency - i * linewidth (positive linewidth decays).
struct ComplexEigenvalue {
    double frequency = 0.0;
    double linewidth = 0.0;
    int branch = 0;

    Complex value() const { return {frequency, -linewidth}; }
    static ComplexEigenvalue from(Complex lambda, int branch) {
        return {lambda.real(), -lambda.imag(), branch};
    }
};

enum class ModelKind { TwoMode, ThreeMode };

/// Eigenvalues ordered by descending real part (ties: descending imaginary part).
struct Spectrum {
    std::vector<ComplexEigenvalue> eigenvalues;
    ModelKind model_kind = ModelKind::TwoMode;
};

enum class PhaseLabel { Broken, AtEP, Unbroken };

std::string to_string(PhaseLabel label);

struct PhaseReport {
    SymmetryClass symmetry = SymmetryClass::Unclassified;
    PhaseLabel label = PhaseLabel::Unbroken;
    int ep_order = 1;          // multiplicity of the coalescing cluster
    double coalescence = 0.0;  // min pairwise |lambda_i - lambda_j|
};

/// Two-mode spectrum lambda_pm = omega_b +- Omega - i gamma_plus with
/// Omega = principal sqrt(j^2 - gamma_minus^2). Branch 0 is '+', branch 1 is '-'.
Spectrum eig2_closed_form(const TwoModeModel& m);

/// Coefficients (c2, c1, c0) of the monic cubic x^3 + c2 x^2 + c1 x + c0 = 0
/// in x = Lambda - omega_2 for a pseudo-Hermitian three-mode model:
/// (-2 delta, -(2 j^2 - delta^2 - gamma_1^2), 2 j^2 delta).
/// Throws NotPseudoHermitianError when the condition fails beyond ph_tol.
struct CubicCoefficients {
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;
};
CubicCoefficients cubic_coefficients(const ThreeModeModel& m, double ph_tol = 1e-9);

/// Roots of the monic real cubic via the trigonometric-free radical form
///   x_1 = (2d - a/c + c)/3,
///   x_2 = (2d + (1+i sqrt3) a/(2c) - (1-i sqrt3) c/2)/3,
///   x_3 = (2d + (1-i sqrt3) a/(2c) - (1+i sqrt3) c/2)/3,
/// with 2d = -c2, a = 3 c1 - c2^2, b = -2 c2^3 + 9 c2 c1 - 27 c0 and
/// c = (b/2 + sqrt(a^3 + b^2/4))^(1/3). Of the six sqrt/cbrt branch
/// combinations, the one maximizing |c| is used; near a triple root
/// (|c|^3 below 1e-42 * scale^3) the radical form is singular and the
/// roots come from the companion-matrix eigensolver instead.
std::array<Complex, 3> cubic_roots_closed_form(double c2, double c1, double c0);

/// Discriminant 18 c2 c1 c0 - 4 c2^3 c0 + c2^2 c1^2 - 4 c1^3 - 27 c0^2;
/// zero exactly when the cubic has a repeated root.
double cubic_discriminant(double c2, double c1, double c0);

/// Three-mode spectrum. Pseudo-Hermitian models go through the real
/// characteristic cubic shifted by omega_2, which preserves the
/// real-or-conjugate-pair structure exactly; general models use the complex
/// characteristic cubic. Both paths Newton-polish the roots.
Spectrum eig3(const ThreeModeModel& m);

/// Pattern-match a spectrum onto broken / at-EP / unbroken. Broken: some pair
/// shares its frequency but splits in linewidth. Unbroken: linewidths all agree
/// (the common dissipative shift drops out of pairwise comparisons) while
/// frequencies split. Throws AmbiguousPhaseError when neither pattern holds.
PhaseReport classify_phase(const Spectrum& s, SymmetryClass sym);

struct EpLocation {
    double param_value = 0.0;
    int ep_order = 2;
};

/// Root of the coalescence indicator (j^2 - gamma_minus^2 for two-mode models,
/// the characteristic-cubic discriminant for pseudo-Hermitian three-mode
/// models) over `param` in [lo, hi], found by Brent to ~1e-12 relative.
/// Sweeping j of a three-mode model keeps g_m = j (and sweeping delta keeps
/// delta_m = omega_1) so the pseudo-Hermitian condition is preserved.
/// Throws NoSignChangeError when the indicator has one sign on the bracket and
/// never comes close to zero.
EpLocation locate_ep(const TwoModeModel& m, std::string_view param, double lo, double hi);
EpLocation locate_ep(const ThreeModeModel& m, std::string_view param, double lo, double hi);

/// Copy of the model with one named field replaced. Three-mode setters keep
/// the pseudo-Hermitian ties when maintain_ph is set.
TwoModeModel with_param(const TwoModeModel& m, std::string_view param, double value);
ThreeModeModel with_param(const ThreeModeModel& m, std::string_view param, double value,
                          bool maintain_ph);

namespace detail {

/// Roots of z^3 + c2 z^2 + c1 z + c0 with complex coefficients; radical form
/// with max-|c| branch choice, companion-matrix fallback near triple roots,
/// Newton polish.
std::array<Complex, 3> solve_monic_cubic(Complex c2, Complex c1, Complex c0);

/// Size of the largest eigenvalue cluster under single-linkage with threshold tol.
int largest_cluster(const std::vector<Complex>& vals, double tol);

}  // namespace detail

}  // namespace epmech
