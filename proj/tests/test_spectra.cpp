#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "epmech/spectra.hpp"
#include "test_support.hpp"

using namespace epmech;
using testsupport::Rng;
using testsupport::companion_cubic_roots;
using testsupport::multiset_distance;

namespace {

std::vector<Complex> values_of(const Spectrum& s) {
    std::vector<Complex> v;
    for (const auto& ev : s.eigenvalues) v.push_back(ev.value());
    return v;
}

ThreeModeModel ph_model(double omega_2, double delta, double gamma_1, double j) {
    const double omega_1 = omega_2 + delta;
    return ThreeModeModel{omega_1, -gamma_1, j, omega_1, gamma_1, omega_2, j};
}

}  // namespace

TEST_CASE("two-mode closed-form spectrum: coalescence and decoupled limits") {
    // balanced gain-loss at j = gamma_minus: both eigenvalues at omega_b
    auto s = eig2_closed_form(TwoModeModel{1.0, 0.1, -0.1, 0.1});
    CHECK(std::abs(s.eigenvalues[0].value() - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(s.eigenvalues[1].value() - Complex(1.0, 0.0)) < 1e-14);

    // decoupled gain-loss pair: opposite linewidths +-0.1
    s = eig2_closed_form(TwoModeModel{1.0, 0.1, -0.1, 0.0});
    CHECK(s.eigenvalues[0].frequency == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.eigenvalues[0].linewidth == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(s.eigenvalues[1].linewidth == doctest::Approx(+0.1).epsilon(1e-12));

    // generic dissipative splitting
    s = eig2_closed_form(TwoModeModel{1.0, 0.1, 0.2, 0.2});
    const double Om = std::sqrt(0.2 * 0.2 - 0.05 * 0.05);
    CHECK(s.eigenvalues[0].frequency == doctest::Approx(1.0 + Om).epsilon(1e-12));
    CHECK(s.eigenvalues[1].frequency == doctest::Approx(1.0 - Om).epsilon(1e-12));
    CHECK(s.eigenvalues[0].linewidth == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(s.eigenvalues[1].linewidth == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(Om == doctest::Approx(0.19364916731037085).epsilon(1e-14));
}

TEST_CASE("two-mode trace and determinant identities") {
    Rng rng(11);
    for (int it = 0; it < 10000; ++it) {
        const auto m = testsupport::random_two_mode(rng);
        const auto s = eig2_closed_form(m);
        const Complex lp = s.eigenvalues[0].value(), lm = s.eigenvalues[1].value();
        const Complex tr_expected(2.0 * m.omega_b, -(m.gamma_1 + m.gamma_2));
        const Complex det_expected =
            Complex(m.omega_b, -m.gamma_1) * Complex(m.omega_b, -m.gamma_2) -
            m.j * m.j;
        const double scale = std::max(std::abs(tr_expected), 1.0);
        CHECK(std::abs(lp + lm - tr_expected) <= 1e-12 * scale);
        CHECK(std::abs(lp * lm - det_expected) <=
              1e-12 * std::max(std::abs(det_expected), 1.0));
    }
}

TEST_CASE("two-mode closed form matches the dense eigensolver on 1e4 draws") {
    Rng rng(12);
    double worst = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const auto m = testsupport::random_two_mode(rng);
        const auto closed = values_of(eig2_closed_form(m));
        const auto numeric = testsupport::dense_eigenvalues(mode_hamiltonian(m));
        double scale = 1.0;
        for (const auto& v : numeric) scale = std::max(scale, std::abs(v));
        worst = std::max(worst, multiset_distance(closed, numeric) / scale);
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("characteristic cubic coefficients") {
    // delta = 0: (0, gamma_1^2 - 2j^2, 0)
    auto cc = cubic_coefficients(ph_model(1.0, 0.0, 0.1, 0.1));
    CHECK(cc.c2 == 0.0);
    CHECK(cc.c1 == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(cc.c0 == 0.0);

    // decoupled limit j = 0
    cc = cubic_coefficients(ph_model(1.0, 0.0, 0.1, 0.0));
    CHECK(cc.c1 == doctest::Approx(0.01).epsilon(1e-12));

    // nondegenerate case
    cc = cubic_coefficients(ph_model(1.0, 0.2, 0.1, 0.169));
    CHECK(cc.c2 == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(cc.c1 == doctest::Approx(-(2 * 0.169 * 0.169 - 0.04 - 0.01)).epsilon(1e-12));
    CHECK(cc.c0 == doctest::Approx(2 * 0.169 * 0.169 * 0.2).epsilon(1e-12));

    SUBCASE("non-pseudo-Hermitian models are rejected") {
        ThreeModeModel bad = ph_model(1.0, 0.0, 0.1, 0.1);
        bad.kappa_m = 0.1;
        CHECK_THROWS_AS(cubic_coefficients(bad), NotPseudoHermitianError);
    }
}

TEST_CASE("the characteristic cubic annihilates the dense eigenvalues") {
    Rng rng(13);
    for (int it = 0; it < 500; ++it) {
        auto m = testsupport::random_pseudo_hermitian(rng);
        const auto cc = cubic_coefficients(m);
        for (const auto& lam : testsupport::dense_eigenvalues(mode_hamiltonian(m))) {
            const Complex x = lam - m.omega_2;
            const Complex res = ((x + cc.c2) * x + cc.c1) * x + cc.c0;
            CHECK(std::abs(res) <= 1e-10);
        }
    }
}

TEST_CASE("closed-form cubic roots: coalescence ladder") {
    // distinct real roots {0, +-0.1}
    auto r = cubic_roots_closed_form(0.0, -0.01, 0.0);
    std::vector<Complex> got(r.begin(), r.end());
    CHECK(multiset_distance(got, {Complex(0), Complex(0.1), Complex(-0.1)}) < 1e-12);

    // conjugate pair {0, +-i sqrt(0.005)}
    r = cubic_roots_closed_form(0.0, 0.005, 0.0);
    got.assign(r.begin(), r.end());
    const double s = std::sqrt(0.005);
    CHECK(multiset_distance(got, {Complex(0), Complex(0, s), Complex(0, -s)}) < 1e-12);

    // triple root at the origin
    r = cubic_roots_closed_form(0.0, 0.0, 0.0);
    for (const auto& z : r) CHECK(std::abs(z) < 1e-15);
}

TEST_CASE("closed-form cubic roots match the companion matrix on 1e4 draws") {
    Rng rng(14);
    double worst = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const double c2 = rng.uniform(-2.0, 2.0);
        const double c1 = rng.uniform(-2.0, 2.0);
        const double c0 = rng.uniform(-2.0, 2.0);
        const auto closed = cubic_roots_closed_form(c2, c1, c0);
        const auto oracle = companion_cubic_roots(c2, c1, c0);
        double scale = 1.0;
        for (const auto& z : oracle) scale = std::max(scale, std::abs(z));
        worst = std::max(worst,
                         multiset_distance({closed.begin(), closed.end()},
                                           {oracle.begin(), oracle.end()}) /
                             scale);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("cubic discriminant") {
    CHECK(cubic_discriminant(0.0, -0.01, 0.0) == doctest::Approx(4e-6).epsilon(1e-12));
    CHECK(cubic_discriminant(0.0, 0.0, 0.0) == 0.0);
    // repeated root <=> zero: (x-1)^2 (x+2) = x^3 - 3x + 2
    CHECK(cubic_discriminant(0.0, -3.0, 2.0) == 0.0);
}

TEST_CASE("three-mode spectrum") {
    SUBCASE("triple coalescence for degenerate modes at sqrt(2) j = gamma_1") {
        const auto s = eig3(ph_model(1.0, 0.0, 0.1, 0.1 / std::sqrt(2.0)));
        for (const auto& ev : s.eigenvalues)
            CHECK(std::abs(ev.value() - Complex(1.0, 0.0)) < 1e-8);
    }
    SUBCASE("diagonal limit j = g_m = 0") {
        const ThreeModeModel m{1.3, 0.2, 0.0, 1.0, 0.05, 0.9, 0.0};
        const auto vals = values_of(eig3(m));
        CHECK(multiset_distance(vals, {Complex(1.3, -0.2), Complex(1.0, -0.05),
                                       Complex(0.9, 0.0)}) < 1e-12);
    }
    SUBCASE("pair coalescence for nondegenerate modes near j = 1.69 gamma_1") {
        const auto m = ph_model(1.0, 0.2, 0.1, 0.15);
        const auto loc = locate_ep(m, "j", 0.12, 0.2);
        const auto s = eig3(with_param(m, "j", loc.param_value, true));
        double coal = 1e300;
        for (size_t i = 0; i < 3; ++i)
            for (size_t k = i + 1; k < 3; ++k)
                coal = std::min(coal, std::abs(s.eigenvalues[i].value() -
                                               s.eigenvalues[k].value()));
        CHECK(coal < 1e-3 * 0.1);
        CHECK(loc.param_value / 0.1 == doctest::Approx(1.69).epsilon(0.01));
    }
}

TEST_CASE("eigenvalue sums equal the trace for generic three-mode models") {
    Rng rng(16);
    for (int it = 0; it < 2000; ++it) {
        const auto m = testsupport::random_three_mode(rng);
        const auto s = eig3(m);
        Complex sum(0, 0);
        for (const auto& ev : s.eigenvalues) sum += ev.value();
        const Complex tr = mode_hamiltonian(m).trace();
        CHECK(std::abs(sum - tr) <= 1e-10 * std::max(std::abs(tr), 1.0));
    }
}

TEST_CASE("pseudo-Hermitian spectra are conjugation-closed") {
    Rng rng(15);
    for (int it = 0; it < 10000; ++it) {
        const auto m = testsupport::random_pseudo_hermitian(rng);
        const auto vals = values_of(eig3(m));
        std::vector<Complex> conj_vals;
        for (const auto& v : vals) conj_vals.push_back(std::conj(v));
        double scale = 1.0;
        for (const auto& v : vals) scale = std::max(scale, std::abs(v));
        CHECK(multiset_distance(vals, conj_vals) <= 1e-10 * scale);
    }
}

TEST_CASE("phase classification") {
    SUBCASE("balanced gain-loss below coalescence: broken") {
        const auto s = eig2_closed_form(TwoModeModel{1.0, 0.1, -0.1, 0.05});
        const auto r = classify_phase(s, SymmetryClass::PTSymmetric);
        CHECK(r.label == PhaseLabel::Broken);
        CHECK(r.symmetry == SymmetryClass::PTSymmetric);
    }
    SUBCASE("balanced gain-loss above coalescence: unbroken") {
        const auto s = eig2_closed_form(TwoModeModel{1.0, 0.1, -0.1, 0.2});
        CHECK(classify_phase(s, SymmetryClass::PTSymmetric).label ==
              PhaseLabel::Unbroken);
    }
    SUBCASE("dissipative pair at j = |gamma_minus|: at the EP") {
        const auto s = eig2_closed_form(TwoModeModel{1.0, 0.1, 0.2, 0.05});
        const auto r = classify_phase(s, SymmetryClass::PurelyDissipative);
        CHECK(r.label == PhaseLabel::AtEP);
        CHECK(r.ep_order == 2);
    }
    SUBCASE("phase boundary is sharp to 1e-6 in j") {
        const double g1 = 0.1, eps = 1e-6;
        for (double f : {0.2, 0.5, 0.9, 1.0 - eps}) {
            const auto s = eig2_closed_form(TwoModeModel{1.0, g1, -g1, f * g1});
            CHECK(classify_phase(s, SymmetryClass::PTSymmetric).label ==
                  PhaseLabel::Broken);
        }
        for (double f : {1.0 + eps, 1.1, 1.5, 2.0}) {
            const auto s = eig2_closed_form(TwoModeModel{1.0, g1, -g1, f * g1});
            CHECK(classify_phase(s, SymmetryClass::PTSymmetric).label ==
                  PhaseLabel::Unbroken);
        }
    }
    SUBCASE("generic spectrum with three distinct decay scales is ambiguous") {
        const auto s = eig3(ThreeModeModel{1.3, 0.2, 0.0, 1.0, 0.05, 0.9, 0.0});
        CHECK_THROWS_AS(classify_phase(s, SymmetryClass::Unclassified),
                        AmbiguousPhaseError);
    }
}

TEST_CASE("exceptional point location") {
    SUBCASE("balanced gain-loss pair: j = gamma_1") {
        const TwoModeModel m{1.0, 0.1, -0.1, 0.05};
        const auto loc = locate_ep(m, "j", 0.01, 0.3);
        CHECK(std::abs(loc.param_value - 0.1) <= 1e-9 * 0.1);
        CHECK(loc.ep_order == 2);
    }
    SUBCASE("degenerate three-mode: j = gamma_1 / sqrt(2), third order") {
        const auto m = ph_model(1.0, 0.0, 0.1, 0.05);
        const auto loc = locate_ep(m, "j", 0.01, 0.15);
        CHECK(std::abs(loc.param_value - 0.1 / std::sqrt(2.0)) <= 1e-9 * 0.1);
        CHECK(loc.ep_order == 3);
    }
    SUBCASE("nondegenerate three-mode: j / gamma_1 = 1.69 +- 0.01, second order") {
        const auto m = ph_model(1.0, 0.2, 0.1, 0.15);
        const auto loc = locate_ep(m, "j", 0.12, 0.2);
        CHECK(loc.param_value / 0.1 == doctest::Approx(1.69).epsilon(0.01));
        CHECK(loc.ep_order == 2);
        // the discriminant vanishes at the located point
        const auto cc =
            cubic_coefficients(with_param(m, "j", loc.param_value, true));
        double dmax = 0.0;
        for (double j : {0.12, 0.15, 0.2}) {
            const auto c = cubic_coefficients(with_param(m, "j", j, true));
            dmax = std::max(dmax, std::abs(cubic_discriminant(c.c2, c.c1, c.c0)));
        }
        CHECK(std::abs(cubic_discriminant(cc.c2, cc.c1, cc.c0)) <= 1e-12 * dmax);
    }
    SUBCASE("no sign change raises") {
        const TwoModeModel m{1.0, 0.1, -0.1, 0.05};
        CHECK_THROWS_AS(locate_ep(m, "j", 0.2, 0.3), NoSignChangeError);
    }
}

TEST_CASE("third-order coalescence has a one-dimensional eigenspace") {
    const double j_ep = 0.1 / std::sqrt(2.0);
    const auto m = ph_model(1.0, 0.0, 0.1, j_ep);
    const Eigen::Matrix3cd H = mode_hamiltonian(m);
    // All three eigenvalues sit at omega_2; rank of H - omega_2 I must be 2.
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(H - Eigen::Matrix3cd::Identity() * 1.0);
    const auto& sv = svd.singularValues();
    CHECK(sv(0) > 1e-3);
    CHECK(sv(1) > 1e-3);
    CHECK(sv(2) < 1e-8 * sv(0));
}

TEST_CASE("the always-real branch stays negative and its magnitude grows") {
    // Nondegenerate case: one root is real on both sides of the pair
    // coalescence. It stays negative and dives monotonically (|x2| grows with
    // j), matching the downward branch of the eigenvalue plot; the companion
    // oracle agrees.
    const auto m = ph_model(1.0, 0.2, 0.1, 0.15);
    double prev = 0.0;
    for (int i = 0; i <= 150; ++i) {
        const double j = (1.0 + 1.5 * i / 150.0) * 0.1;
        const auto cc = cubic_coefficients(with_param(m, "j", j, true));
        const auto roots = cubic_roots_closed_form(cc.c2, cc.c1, cc.c0);
        const auto oracle = companion_cubic_roots(cc.c2, cc.c1, cc.c0);
        double x2 = 1e300, x2o = 1e300;
        for (const auto& z : roots)
            if (std::abs(z.imag()) < 1e-8 && z.real() < x2) x2 = z.real();
        for (const auto& z : oracle)
            if (std::abs(z.imag()) < 1e-8 && z.real() < x2o) x2o = z.real();
        REQUIRE(x2 < 1e300);
        CHECK(x2 == doctest::Approx(x2o).epsilon(1e-9));
        CHECK(x2 < 0.0);
        if (i > 0) CHECK(x2 < prev);
        prev = x2;
    }
}
