#include "epmech/model.hpp"

#include <cmath>
#include <sstream>

namespace epmech {

namespace {

bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void PhysicalParams::validate() const {
    if (!all_finite({delta_a, delta_m, kappa_a, kappa_m, g_a_lin, g_m_lin,
                     omega_1, omega_2, j}))
        throw InvalidModelError("PhysicalParams: non-finite field");
    if (g_a_lin < 0 || g_m_lin < 0 || j < 0)
        throw InvalidModelError("PhysicalParams: couplings g_a, g_m, j must be >= 0");
}

void TwoModeModel::validate() const {
    if (!all_finite({omega_b, gamma_1, gamma_2, j}))
        throw InvalidModelError("TwoModeModel: non-finite field");
    if (j < 0) throw InvalidModelError("TwoModeModel: j must be >= 0");
}

void ThreeModeModel::validate() const {
    if (!all_finite({delta_m, kappa_m, g_m_lin, omega_1, gamma_1, omega_2, j}))
        throw InvalidModelError("ThreeModeModel: non-finite field");
    if (g_m_lin < 0 || j < 0)
        throw InvalidModelError("ThreeModeModel: couplings g_m, j must be >= 0");
}

void DynamicsMatrix::validate() const {
    const auto n = entries.rows();
    if (entries.cols() != n || (n != 4 && n != 6 && n != 8))
        throw InvalidModelError("DynamicsMatrix: dimension must be 4, 6 or 8");
    if (!entries.allFinite())
        throw InvalidModelError("DynamicsMatrix: non-finite entry");
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw InvalidModelError("DynamicsMatrix: labels length must equal dimension");
}

std::string to_string(SymmetryClass s) {
    switch (s) {
        case SymmetryClass::PTSymmetric: return "pt_symmetric";
        case SymmetryClass::PurelyDissipative: return "purely_dissipative";
        case SymmetryClass::PseudoHermitian: return "pseudo_hermitian";
        case SymmetryClass::Unclassified: return "unclassified";
    }
    return "unclassified";
}

std::pair<double, double> effective_rates(const PhysicalParams& p) {
    p.validate();
    if (p.kappa_a == 0.0)
        throw ZeroDenominatorError("effective_rates: kappa_a = 0");
    if (p.kappa_m == 0.0)
        throw ZeroDenominatorError("effective_rates: kappa_m = 0");
    return {p.g_a_lin * p.g_a_lin / p.kappa_a, p.g_m_lin * p.g_m_lin / p.kappa_m};
}

TwoModeModel reduce_to_two_mode(const PhysicalParams& p) {
    p.validate();
    const double scale = std::max(std::abs(p.omega_1), std::abs(p.omega_2));
    if (std::abs(p.omega_1 - p.omega_2) > kDegeneracyTol * scale) {
        std::ostringstream os;
        os << "reduce_to_two_mode: omega_1 = " << p.omega_1 << " and omega_2 = "
           << p.omega_2 << " are not degenerate";
        throw NondegenerateModesError(os.str());
    }
    auto [g1, g2] = effective_rates(p);
    return TwoModeModel{p.omega_1, g1, g2, p.j};
}

ThreeModeModel reduce_to_three_mode(const PhysicalParams& p) {
    p.validate();
    if (p.kappa_a == 0.0)
        throw ZeroDenominatorError("reduce_to_three_mode: kappa_a = 0");
    const double gamma_1 = p.g_a_lin * p.g_a_lin / p.kappa_a;
    return ThreeModeModel{p.delta_m, p.kappa_m, p.g_m_lin,
                          p.omega_1, gamma_1, p.omega_2, p.j};
}

bool two_mode_reduction_valid(const PhysicalParams& p) {
    return std::abs(p.kappa_a) >= kAdiabaticRatioMin * p.g_a_lin &&
           std::abs(p.kappa_m) >= kAdiabaticRatioMin * p.g_m_lin;
}

bool three_mode_reduction_valid(const PhysicalParams& p) {
    return std::abs(p.kappa_a) >= kAdiabaticRatioMin * p.g_a_lin;
}

PseudoHermitianReport check_pseudo_hermitian(const ThreeModeModel& m, double tol) {
    m.validate();
    if (!(tol > 0))
        throw InvalidModelError("check_pseudo_hermitian: tol must be > 0");
    const double omega_scale = std::max(std::abs(m.omega_1), std::abs(m.omega_2));
    const double denom = std::max(std::abs(m.gamma_1),
                                  kResidualFloorFactor * omega_scale);
    PseudoHermitianReport r;
    if (denom == 0.0) {
        // Degenerate zero-scale model: residuals are raw absolute mismatches.
        r.residuals = {std::abs(m.gamma_1 + m.kappa_m),
                       std::abs(m.delta_m - m.omega_1),
                       std::abs(m.g_m_lin - m.j)};
    } else {
        r.residuals = {std::abs(m.gamma_1 + m.kappa_m) / denom,
                       std::abs(m.delta_m - m.omega_1) / denom,
                       std::abs(m.g_m_lin - m.j) / denom};
    }
    r.satisfied = r.residuals[0] <= tol && r.residuals[1] <= tol &&
                  r.residuals[2] <= tol;
    return r;
}

DynamicsMatrix dynamics_matrix(const TwoModeModel& m) {
    m.validate();
    const double wb = m.omega_b, g1 = m.gamma_1, g2 = m.gamma_2, J = m.j;
    DynamicsMatrix A;
    A.entries.setZero(4, 4);
    A.entries << -g1,  wb,  0.0,   J,
                 -wb, -g1,  -J,  0.0,
                 0.0,   J, -g2,   wb,
                  -J, 0.0, -wb,  -g2;
    A.labels = {"q1", "p1", "q2", "p2"};
    return A;
}

DynamicsMatrix dynamics_matrix(const ThreeModeModel& m) {
    m.validate();
    const double w1 = m.omega_1, w2 = m.omega_2, g1 = m.gamma_1;
    const double dm = m.delta_m, km = m.kappa_m, Gm = m.g_m_lin, J = m.j;
    DynamicsMatrix A;
    A.entries.setZero(6, 6);
    // order: q1 p1 q2 p2 qm pm
    A.entries(0, 0) = -g1; A.entries(0, 1) = w1; A.entries(0, 3) = J;
    A.entries(1, 0) = -w1; A.entries(1, 1) = -g1; A.entries(1, 2) = -J;
    A.entries(2, 3) = w2; A.entries(2, 1) = J; A.entries(2, 5) = Gm;
    A.entries(3, 2) = -w2; A.entries(3, 0) = -J; A.entries(3, 4) = -Gm;
    A.entries(4, 4) = -km; A.entries(4, 5) = dm; A.entries(4, 3) = Gm;
    A.entries(5, 5) = -km; A.entries(5, 4) = -dm; A.entries(5, 2) = -Gm;
    A.labels = {"q1", "p1", "q2", "p2", "qm", "pm"};
    return A;
}

DynamicsMatrix dynamics_matrix(const PhysicalParams& p) {
    p.validate();
    const double w1 = p.omega_1, w2 = p.omega_2, J = p.j;
    const double da = p.delta_a, ka = p.kappa_a, Ga = p.g_a_lin;
    const double dm = p.delta_m, km = p.kappa_m, Gm = p.g_m_lin;
    DynamicsMatrix A;
    A.entries.setZero(8, 8);
    // order: q1 p1 q2 p2 qm pm qa pa; mean-value flow only, drives already
    // absorbed by the linearization.
    A.entries(0, 1) = w1; A.entries(0, 3) = J; A.entries(0, 7) = Ga;
    A.entries(1, 0) = -w1; A.entries(1, 2) = -J; A.entries(1, 6) = -Ga;
    A.entries(2, 3) = w2; A.entries(2, 1) = J; A.entries(2, 5) = Gm;
    A.entries(3, 2) = -w2; A.entries(3, 0) = -J; A.entries(3, 4) = -Gm;
    A.entries(4, 4) = -km; A.entries(4, 5) = dm; A.entries(4, 3) = Gm;
    A.entries(5, 5) = -km; A.entries(5, 4) = -dm; A.entries(5, 2) = -Gm;
    A.entries(6, 6) = -ka; A.entries(6, 7) = da; A.entries(6, 1) = Ga;
    A.entries(7, 7) = -ka; A.entries(7, 6) = -da; A.entries(7, 0) = -Ga;
    A.labels = {"q1", "p1", "q2", "p2", "qm", "pm", "qa", "pa"};
    return A;
}

Eigen::Matrix2cd mode_hamiltonian(const TwoModeModel& m) {
    m.validate();
    const std::complex<double> I(0.0, 1.0);
    Eigen::Matrix2cd H;
    H << m.omega_b - I * m.gamma_1, m.j,
         m.j, m.omega_b - I * m.gamma_2;
    return H;
}

Eigen::Matrix3cd mode_hamiltonian(const ThreeModeModel& m) {
    m.validate();
    const std::complex<double> I(0.0, 1.0);
    Eigen::Matrix3cd H;
    H << m.delta_m - I * m.kappa_m, 0.0, m.g_m_lin,
         0.0, m.omega_1 - I * m.gamma_1, m.j,
         m.g_m_lin, m.j, m.omega_2;
    return H;
}

Eigen::Matrix4cd mode_hamiltonian(const PhysicalParams& p) {
    p.validate();
    const std::complex<double> I(0.0, 1.0);
    Eigen::Matrix4cd H;
    H.setZero();
    H(0, 0) = p.omega_1; H(0, 1) = p.j; H(0, 3) = p.g_a_lin;
    H(1, 0) = p.j; H(1, 1) = p.omega_2; H(1, 2) = p.g_m_lin;
    H(2, 1) = p.g_m_lin; H(2, 2) = p.delta_m - I * p.kappa_m;
    H(3, 0) = p.g_a_lin; H(3, 3) = p.delta_a - I * p.kappa_a;
    return H;
}

SymmetryClass infer_symmetry(const TwoModeModel& m, double tol) {
    const double scale = std::max({std::abs(m.gamma_1), std::abs(m.gamma_2),
                                   kResidualFloorFactor * std::abs(m.omega_b)});
    if (scale == 0.0) return SymmetryClass::PTSymmetric;  // Hermitian limit
    if (std::abs(m.gamma_1 + m.gamma_2) <= tol * scale)
        return SymmetryClass::PTSymmetric;
    if (m.gamma_1 >= 0.0 && m.gamma_2 >= 0.0)
        return SymmetryClass::PurelyDissipative;
    return SymmetryClass::Unclassified;
}

SymmetryClass infer_symmetry(const ThreeModeModel& m, double tol) {
    return check_pseudo_hermitian(m, tol).satisfied
               ? SymmetryClass::PseudoHermitian
               : SymmetryClass::Unclassified;
}

}  // namespace epmech
