#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "epmech/model.hpp"
#include "test_support.hpp"

using namespace epmech;
using testsupport::Rng;

TEST_CASE("effective rates from direct ratios") {
    PhysicalParams p;
    p.kappa_a = 10.0;
    p.kappa_m = 10.0;
    p.g_a_lin = 1.0;
    p.g_m_lin = 1.0;
    p.omega_1 = p.omega_2 = 1.0;
    auto [g1, g2] = effective_rates(p);
    CHECK(g1 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g2 == doctest::Approx(0.1).epsilon(1e-15));

    // zero coupling and a gainy Kittel mode
    p.g_a_lin = 0.0;
    p.kappa_a = 5.0;
    p.g_m_lin = 2.0;
    p.kappa_m = -8.0;
    std::tie(g1, g2) = effective_rates(p);
    CHECK(g1 == 0.0);
    CHECK(g2 == doctest::Approx(-0.5).epsilon(1e-15));

    p.g_a_lin = 3.0;
    p.kappa_a = 45.0;
    p.g_m_lin = 3.0;
    p.kappa_m = 30.0;
    std::tie(g1, g2) = effective_rates(p);
    CHECK(g1 == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(g2 == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("effective rates reject zero kappa") {
    PhysicalParams p;
    p.omega_1 = p.omega_2 = 1.0;
    p.kappa_a = 0.0;
    p.kappa_m = 1.0;
    CHECK_THROWS_AS(effective_rates(p), ZeroDenominatorError);
    p.kappa_a = 1.0;
    p.kappa_m = 0.0;
    CHECK_THROWS_AS(effective_rates(p), ZeroDenominatorError);
}

TEST_CASE("two-mode reduction") {
    PhysicalParams p;
    p.omega_1 = p.omega_2 = 1.0;
    p.g_a_lin = 1.0;
    p.kappa_a = 10.0;
    p.g_m_lin = 1.0;
    p.kappa_m = -10.0;
    p.j = 0.1;
    const TwoModeModel m = reduce_to_two_mode(p);
    CHECK(m.omega_b == 1.0);
    CHECK(m.gamma_1 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(m.gamma_2 == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(m.j == 0.1);

    SUBCASE("nondegenerate mechanical modes are rejected") {
        p.omega_2 = 1.5;
        CHECK_THROWS_AS(reduce_to_two_mode(p), NondegenerateModesError);
    }
    SUBCASE("Hermitian limit") {
        p.g_a_lin = 0.0;
        p.g_m_lin = 0.0;
        p.kappa_m = 10.0;
        p.j = 0.3;
        const TwoModeModel h = reduce_to_two_mode(p);
        CHECK(h.gamma_1 == 0.0);
        CHECK(h.gamma_2 == 0.0);
        CHECK(h.j == 0.3);
    }
}

TEST_CASE("rate-coupling consistency gamma_1 * kappa_a = g_a^2") {
    Rng rng(101);
    for (int it = 0; it < 1000; ++it) {
        PhysicalParams p = testsupport::random_physical(rng);
        auto [g1, g2] = effective_rates(p);
        const double lhs = g1 * p.kappa_a;
        const double rhs = p.g_a_lin * p.g_a_lin;
        CHECK(std::abs(lhs - rhs) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(rhs, 1e-300));
    }
}

TEST_CASE("three-mode reduction") {
    PhysicalParams p;
    p.kappa_a = 10.0;
    p.g_a_lin = 1.0;
    p.delta_m = 0.7;
    p.kappa_m = -0.3;
    p.g_m_lin = 0.2;
    p.omega_1 = 1.0;
    p.omega_2 = 0.9;
    p.j = 0.15;
    const ThreeModeModel m = reduce_to_three_mode(p);
    CHECK(m.gamma_1 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(m.delta_m == 0.7);
    CHECK(m.kappa_m == -0.3);
    CHECK(m.g_m_lin == 0.2);
    CHECK(m.omega_1 == 1.0);
    CHECK(m.omega_2 == 0.9);
    CHECK(m.j == 0.15);
    CHECK(m.delta() == doctest::Approx(0.1).epsilon(1e-12));

    SUBCASE("zero cavity coupling gives pure magnomechanics") {
        p.g_a_lin = 0.0;
        CHECK(reduce_to_three_mode(p).gamma_1 == 0.0);
    }
    SUBCASE("paper-scale parameters: gamma_1 = 0.1 omega_b") {
        const double omega_b = 2.0 * M_PI * 1e7;
        p.omega_1 = p.omega_2 = omega_b;
        p.kappa_a = 100.0 * omega_b;
        p.g_a_lin = std::sqrt(0.1 * 100.0) * omega_b;
        CHECK(three_mode_reduction_valid(p));
        CHECK(reduce_to_three_mode(p).gamma_1 ==
              doctest::Approx(0.1 * omega_b).epsilon(1e-12));
    }
    SUBCASE("zero kappa_a throws") {
        p.kappa_a = 0.0;
        CHECK_THROWS_AS(reduce_to_three_mode(p), ZeroDenominatorError);
    }
}

TEST_CASE("adiabatic validity predicate") {
    PhysicalParams p;
    p.omega_1 = p.omega_2 = 1.0;
    p.g_a_lin = 1.0;
    p.g_m_lin = 1.0;
    p.kappa_a = 10.0;
    p.kappa_m = 10.0;
    CHECK(two_mode_reduction_valid(p));
    p.kappa_a = 9.9;
    CHECK_FALSE(two_mode_reduction_valid(p));
    CHECK_FALSE(three_mode_reduction_valid(p));
    p.kappa_a = -12.0;  // gain counts through its magnitude
    CHECK(three_mode_reduction_valid(p));
}

TEST_CASE("pseudo-Hermitian condition check") {
    ThreeModeModel m{1.0, -0.1, 0.07, 1.0, 0.1, 1.0, 0.07};
    auto r = check_pseudo_hermitian(m, 1e-12);
    CHECK(r.satisfied);
    CHECK(r.residuals[0] == 0.0);
    CHECK(r.residuals[1] == 0.0);
    CHECK(r.residuals[2] == 0.0);

    SUBCASE("lossy Kittel mode breaks the gain-loss balance") {
        m.kappa_m = +0.1;
        r = check_pseudo_hermitian(m, 1e-9);
        CHECK_FALSE(r.satisfied);
        CHECK(r.residuals[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("detuning off the red sideband") {
        m.delta_m = 1.001;
        r = check_pseudo_hermitian(m, 1e-6);
        CHECK_FALSE(r.satisfied);
        CHECK(r.residuals[1] > 1e-6);
    }
    SUBCASE("tol must be positive") {
        CHECK_THROWS_AS(check_pseudo_hermitian(m, 0.0), InvalidModelError);
    }
}

TEST_CASE("two-mode dynamics matrix rows") {
    const TwoModeModel m{1.0, 0.1, -0.1, 0.2};
    const DynamicsMatrix A = dynamics_matrix(m);
    REQUIRE(A.dimension() == 4);
    CHECK(A.labels == std::vector<std::string>{"q1", "p1", "q2", "p2"});
    // q1 row: -gamma_1 q1 + omega_b p1 + j p2
    CHECK(A.entries(0, 0) == -0.1);
    CHECK(A.entries(0, 1) == 1.0);
    CHECK(A.entries(0, 2) == 0.0);
    CHECK(A.entries(0, 3) == 0.2);
    // p1 row: -omega_b q1 - gamma_1 p1 - j q2
    CHECK(A.entries(1, 0) == -1.0);
    CHECK(A.entries(1, 1) == -0.1);
    CHECK(A.entries(1, 2) == -0.2);
    CHECK(A.entries(1, 3) == 0.0);
}

TEST_CASE("decoupled lossless pair is a block rotation generator") {
    const double wb = 0.8;
    const DynamicsMatrix A = dynamics_matrix(TwoModeModel{wb, 0.0, 0.0, 0.0});
    Eigen::EigenSolver<Eigen::MatrixXd> es(A.entries);
    std::vector<std::complex<double>> ev(4);
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
    CHECK(std::abs(ev[0] - std::complex<double>(0, -wb)) < 1e-12);
    CHECK(std::abs(ev[1] - std::complex<double>(0, -wb)) < 1e-12);
    CHECK(std::abs(ev[2] - std::complex<double>(0, wb)) < 1e-12);
    CHECK(std::abs(ev[3] - std::complex<double>(0, wb)) < 1e-12);
}

// Quadrature doubling: the real 2n x 2n flow has eigenvalues
// {-i lambda} union {conj(-i lambda)} for the n complex mode eigenvalues.
namespace {

void check_quadrature_doubling(const Eigen::MatrixXd& A, const Eigen::MatrixXcd& H) {
    using testsupport::dense_eigenvalues;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    std::vector<std::complex<double>> mu(A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) mu[i] = es.eigenvalues()(i);
    std::vector<std::complex<double>> expected;
    for (const auto& lam : dense_eigenvalues(H)) {
        const std::complex<double> v = std::complex<double>(0, -1) * lam;
        expected.push_back(v);
        expected.push_back(std::conj(v));
    }
    double scale = 1e-300;
    for (const auto& v : expected) scale = std::max(scale, std::abs(v));
    CHECK(testsupport::multiset_distance(mu, expected) <= 1e-10 * scale);
}

}  // namespace

TEST_CASE("quadrature doubling for all model families") {
    Rng rng(202);
    for (int it = 0; it < 200; ++it) {
        const auto m2 = testsupport::random_two_mode(rng);
        check_quadrature_doubling(dynamics_matrix(m2).entries, mode_hamiltonian(m2));
        const auto m3 = testsupport::random_three_mode(rng);
        check_quadrature_doubling(dynamics_matrix(m3).entries, mode_hamiltonian(m3));
        const auto pf = testsupport::random_physical(rng);
        check_quadrature_doubling(dynamics_matrix(pf).entries, mode_hamiltonian(pf));
    }
}

TEST_CASE("derived gamma_plus/gamma_minus stay consistent") {
    Rng rng(303);
    for (int it = 0; it < 1000; ++it) {
        const auto m = testsupport::random_two_mode(rng);
        const double sum = m.gamma_plus() + m.gamma_minus();
        CHECK(std::abs(sum - m.gamma_1) <=
              2.0 * std::numeric_limits<double>::epsilon() *
                  (std::abs(m.gamma_1) + std::abs(m.gamma_2) + 1e-300));
    }
}

TEST_CASE("symmetry inference") {
    CHECK(infer_symmetry(TwoModeModel{1.0, 0.1, -0.1, 0.2}) == SymmetryClass::PTSymmetric);
    CHECK(infer_symmetry(TwoModeModel{1.0, 0.1, 0.2, 0.2}) ==
          SymmetryClass::PurelyDissipative);
    CHECK(infer_symmetry(TwoModeModel{1.0, 0.1, -0.2, 0.2}) ==
          SymmetryClass::Unclassified);
    CHECK(infer_symmetry(ThreeModeModel{1.0, -0.1, 0.07, 1.0, 0.1, 1.0, 0.07}) ==
          SymmetryClass::PseudoHermitian);
    CHECK(infer_symmetry(ThreeModeModel{1.0, 0.1, 0.07, 1.0, 0.1, 1.0, 0.07}) ==
          SymmetryClass::Unclassified);
}

TEST_CASE("type invariants are enforced") {
    PhysicalParams p;
    p.omega_1 = p.omega_2 = 1.0;
    p.j = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidModelError);
    p.j = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), InvalidModelError);

    TwoModeModel m{1.0, 0.1, 0.1, -0.5};
    CHECK_THROWS_AS(m.validate(), InvalidModelError);

    DynamicsMatrix A;
    A.entries.setZero(5, 5);
    A.labels = {"a", "b", "c", "d", "e"};
    CHECK_THROWS_AS(A.validate(), InvalidModelError);
}
