#include "epmech/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace epmech {

namespace {

void sort_descending(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

Spectrum make_spectrum(std::vector<Complex> vals, ModelKind kind) {
    sort_descending(vals);
    Spectrum s;
    s.model_kind = kind;
    s.eigenvalues.reserve(vals.size());
    for (size_t i = 0; i < vals.size(); ++i)
        s.eigenvalues.push_back(ComplexEigenvalue::from(vals[i], static_cast<int>(i)));
    return s;
}

double spectral_scale(const Spectrum& s) {
    double sc = 0.0;
    for (const auto& ev : s.eigenvalues) sc = std::max(sc, std::abs(ev.value()));
    return sc;
}

// One Newton step per iteration on the monic cubic; stops when the update
// stagnates. Harmless on (near-)multiple roots, where it simply stalls.
Complex polish_root(Complex z, Complex c2, Complex c1, Complex c0) {
    for (int it = 0; it < 4; ++it) {
        const Complex f = ((z + c2) * z + c1) * z + c0;
        const Complex df = (3.0 * z + 2.0 * c2) * z + c1;
        if (std::abs(df) == 0.0) break;
        const Complex step = f / df;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        const Complex znew = z - step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) return znew;
        z = znew;
    }
    return z;
}

std::array<Complex, 3> companion_roots(Complex c2, Complex c1, Complex c0) {
    Eigen::Matrix3cd C;
    C.setZero();
    C(0, 2) = -c0;
    C(1, 0) = 1.0; C(1, 2) = -c1;
    C(2, 1) = 1.0; C(2, 2) = -c2;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(C, false);
    const auto& v = es.eigenvalues();
    return {v(0), v(1), v(2)};
}

}  // namespace

std::string to_string(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::Broken: return "broken";
        case PhaseLabel::AtEP: return "at_ep";
        case PhaseLabel::Unbroken: return "unbroken";
    }
    return "unbroken";
}

Spectrum eig2_closed_form(const TwoModeModel& m) {
    m.validate();
    const double gm = m.gamma_minus();
    const Complex omega = std::sqrt(Complex(m.j * m.j - gm * gm, 0.0));
    const Complex shift(m.omega_b, -m.gamma_plus());
    // Principal sqrt puts Im(omega) >= 0, so '+' sorts first in both phases.
    return make_spectrum({shift + omega, shift - omega}, ModelKind::TwoMode);
}

CubicCoefficients cubic_coefficients(const ThreeModeModel& m, double ph_tol) {
    const auto ph = check_pseudo_hermitian(m, ph_tol);
    if (!ph.satisfied) {
        std::ostringstream os;
        os << "cubic_coefficients: pseudo-Hermitian condition violated, residuals ("
           << ph.residuals[0] << ", " << ph.residuals[1] << ", " << ph.residuals[2]
           << ") exceed tol " << ph_tol;
        throw NotPseudoHermitianError(os.str());
    }
    const double d = m.delta(), g1 = m.gamma_1, J = m.j;
    return {-2.0 * d, -(2.0 * J * J - d * d - g1 * g1), 2.0 * J * J * d};
}

double cubic_discriminant(double c2, double c1, double c0) {
    return 18.0 * c2 * c1 * c0 - 4.0 * c2 * c2 * c2 * c0 + c2 * c2 * c1 * c1 -
           4.0 * c1 * c1 * c1 - 27.0 * c0 * c0;
}

namespace detail {

std::array<Complex, 3> solve_monic_cubic(Complex c2, Complex c1, Complex c0) {
    const Complex two_d = -c2;
    const Complex a = 3.0 * c1 - c2 * c2;
    const Complex b = -2.0 * c2 * c2 * c2 + 9.0 * c2 * c1 - 27.0 * c0;

    const double scale = std::max({std::abs(c2), std::sqrt(std::abs(c1)),
                                   std::cbrt(std::abs(c0))});

    // c^3 = b/2 +- sqrt(a^3 + b^2/4): pick the sign, then the cube-root branch,
    // that maximizes |c|. The radical form degenerates when both a and b
    // vanish (triple root); that case goes to the companion matrix.
    const Complex root = std::sqrt(a * a * a + b * b / 4.0);
    const Complex cube = (std::abs(b / 2.0 + root) >= std::abs(b / 2.0 - root))
                             ? b / 2.0 + root
                             : b / 2.0 - root;
    const double ccube_floor = 1e-42 * scale * scale * scale;
    if (!(std::abs(cube) > ccube_floor)) {
        auto r = companion_roots(c2, c1, c0);
        for (auto& z : r) z = polish_root(z, c2, c1, c0);
        return r;
    }
    const Complex c = std::pow(cube, 1.0 / 3.0);  // any branch; they permute roots

    const Complex i_sqrt3(0.0, std::sqrt(3.0));
    const Complex one = 1.0;
    std::array<Complex, 3> roots{
        (two_d - a / c + c) / 3.0,
        (two_d + (one + i_sqrt3) * a / (2.0 * c) - (one - i_sqrt3) * c / 2.0) / 3.0,
        (two_d + (one - i_sqrt3) * a / (2.0 * c) - (one + i_sqrt3) * c / 2.0) / 3.0,
    };
    for (auto& z : roots) z = polish_root(z, c2, c1, c0);
    return roots;
}

int largest_cluster(const std::vector<Complex>& vals, double tol) {
    const int n = static_cast<int>(vals.size());
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
            if (std::abs(vals[i] - vals[k]) <= tol) parent[find(i)] = find(k);
    std::vector<int> count(n, 0);
    int best = 0;
    for (int i = 0; i < n; ++i) best = std::max(best, ++count[find(i)]);
    return best;
}

}  // namespace detail

std::array<Complex, 3> cubic_roots_closed_form(double c2, double c1, double c0) {
    if (!std::isfinite(c2) || !std::isfinite(c1) || !std::isfinite(c0))
        throw InvalidModelError("cubic_roots_closed_form: non-finite coefficient");
    return detail::solve_monic_cubic(Complex(c2), Complex(c1), Complex(c0));
}

Spectrum eig3(const ThreeModeModel& m) {
    m.validate();
    if (check_pseudo_hermitian(m, 1e-9).satisfied) {
        // Real shifted cubic keeps the spectrum exactly closed under conjugation.
        const auto cc = cubic_coefficients(m);
        auto x = detail::solve_monic_cubic(Complex(cc.c2), Complex(cc.c1), Complex(cc.c0));
        return make_spectrum({x[0] + m.omega_2, x[1] + m.omega_2, x[2] + m.omega_2},
                             ModelKind::ThreeMode);
    }
    const Eigen::Matrix3cd H = mode_hamiltonian(m);
    const Complex tr = H.trace();
    // Sum of principal 2x2 minors.
    Complex m2(0.0, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int k = i + 1; k < 3; ++k)
            m2 += H(i, i) * H(k, k) - H(i, k) * H(k, i);
    const Complex det = H.determinant();
    auto roots = detail::solve_monic_cubic(-tr, m2, -det);
    return make_spectrum({roots[0], roots[1], roots[2]}, ModelKind::ThreeMode);
}

PhaseReport classify_phase(const Spectrum& s, SymmetryClass sym) {
    const size_t n = s.eigenvalues.size();
    if (n < 2) throw InvalidModelError("classify_phase: need at least 2 eigenvalues");

    std::vector<Complex> vals;
    vals.reserve(n);
    for (const auto& ev : s.eigenvalues) vals.push_back(ev.value());

    const double scale = std::max(spectral_scale(s),
                                  std::numeric_limits<double>::min());
    const double ep_tol = kEpTolRel * scale;
    const double freq_tol = kFreqTolRel * scale;

    double coal = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i)
        for (size_t k = i + 1; k < n; ++k)
            coal = std::min(coal, std::abs(vals[i] - vals[k]));

    PhaseReport r;
    r.symmetry = sym;
    r.coalescence = coal;

    if (coal <= ep_tol) {
        r.label = PhaseLabel::AtEP;
        r.ep_order = detail::largest_cluster(vals, ep_tol);
        return r;
    }
    r.ep_order = detail::largest_cluster(vals, ep_tol);

    // Broken: some pair resonant in frequency yet split in linewidth.
    bool broken = false;
    for (size_t i = 0; i < n && !broken; ++i)
        for (size_t k = i + 1; k < n && !broken; ++k)
            if (std::abs(vals[i].real() - vals[k].real()) <= freq_tol &&
                std::abs(vals[i].imag() - vals[k].imag()) > freq_tol)
                broken = true;
    if (broken) {
        r.label = PhaseLabel::Broken;
        return r;
    }

    // Unbroken: all linewidths degenerate (pairwise differences, so a common
    // dissipative offset cancels) while frequencies split.
    bool lw_degenerate = true;
    for (size_t i = 0; i < n && lw_degenerate; ++i)
        for (size_t k = i + 1; k < n && lw_degenerate; ++k)
            if (std::abs(vals[i].imag() - vals[k].imag()) > freq_tol)
                lw_degenerate = false;
    bool freq_split = true;
    for (size_t i = 0; i < n && freq_split; ++i)
        for (size_t k = i + 1; k < n && freq_split; ++k)
            if (std::abs(vals[i].real() - vals[k].real()) <= freq_tol)
                freq_split = false;
    if (lw_degenerate && freq_split) {
        r.label = PhaseLabel::Unbroken;
        return r;
    }

    throw AmbiguousPhaseError(
        "classify_phase: spectrum matches neither the broken nor the unbroken pattern");
}

TwoModeModel with_param(const TwoModeModel& m, std::string_view param, double value) {
    TwoModeModel out = m;
    if (param == "j") out.j = value;
    else if (param == "gamma_1") out.gamma_1 = value;
    else if (param == "gamma_2") out.gamma_2 = value;
    else if (param == "omega_b") out.omega_b = value;
    else throw InvalidModelError("with_param: unknown two-mode parameter '" +
                                 std::string(param) + "'");
    return out;
}

ThreeModeModel with_param(const ThreeModeModel& m, std::string_view param,
                          double value, bool maintain_ph) {
    ThreeModeModel out = m;
    if (param == "j") {
        out.j = value;
        if (maintain_ph) out.g_m_lin = value;
    } else if (param == "delta") {
        out.omega_1 = m.omega_2 + value;
        if (maintain_ph) out.delta_m = out.omega_1;
    } else if (param == "gamma_1") {
        out.gamma_1 = value;
        if (maintain_ph) out.kappa_m = -value;
    } else if (param == "g_m_lin") {
        out.g_m_lin = value;
    } else if (param == "kappa_m") {
        out.kappa_m = value;
    } else if (param == "delta_m") {
        out.delta_m = value;
    } else if (param == "omega_1") {
        out.omega_1 = value;
    } else if (param == "omega_2") {
        out.omega_2 = value;
    } else {
        throw InvalidModelError("with_param: unknown three-mode parameter '" +
                                std::string(param) + "'");
    }
    return out;
}

namespace {

// Brent's method with bisection fallback; assumes f(a) f(b) <= 0.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb) {
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() *
                           std::abs(b) + 1e-300;
        const double mid = 0.5 * (c - b);
        if (std::abs(mid) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = mid;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * mid * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * mid * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * mid * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;  // accept interpolation
            } else {
                d = e = mid;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (mid > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = e = b - a;
        }
    }
    return b;
}

struct Indicator {
    std::function<double(double)> f;                    // coalescence indicator
    std::function<std::vector<Complex>(double)> eigs;   // spectrum at param value
};

EpLocation locate_ep_impl(const Indicator& ind, std::string_view param,
                          double lo, double hi, double cluster_scale) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidModelError("locate_ep: bracket must be a finite interval");

    double root = std::numeric_limits<double>::quiet_NaN();
    const double fa = ind.f(lo), fb = ind.f(hi);
    if ((fa <= 0 && fb >= 0) || (fa >= 0 && fb <= 0)) {
        root = brent_root(ind.f, lo, hi, fa, fb);
    } else {
        // Constant sign: scan for a sign change or an interior touch of zero.
        const int n_scan = 256;
        double prev_v = lo, prev_f = fa;
        double best_v = lo, best_f = std::abs(fa);
        double fmax = std::abs(fa);
        for (int i = 1; i <= n_scan; ++i) {
            const double v = lo + (hi - lo) * i / n_scan;
            const double fv = ind.f(v);
            fmax = std::max(fmax, std::abs(fv));
            if ((prev_f <= 0 && fv >= 0) || (prev_f >= 0 && fv <= 0)) {
                root = brent_root(ind.f, prev_v, v, prev_f, fv);
                break;
            }
            if (std::abs(fv) < best_f) {
                best_f = std::abs(fv);
                best_v = v;
            }
            prev_v = v;
            prev_f = fv;
        }
        if (std::isnan(root)) {
            // Golden-section refine of |f| around the scan minimum.
            double a = std::max(lo, best_v - (hi - lo) / n_scan);
            double b = std::min(hi, best_v + (hi - lo) / n_scan);
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = std::abs(ind.f(x1)), f2 = std::abs(ind.f(x2));
            for (int it = 0; it < 160; ++it) {
                if (f1 < f2) {
                    b = x2; x2 = x1; f2 = f1;
                    x1 = b - gr * (b - a); f1 = std::abs(ind.f(x1));
                } else {
                    a = x1; x1 = x2; f1 = f2;
                    x2 = a + gr * (b - a); f2 = std::abs(ind.f(x2));
                }
            }
            const double v = 0.5 * (a + b);
            if (std::abs(ind.f(v)) > kEpTolRel * std::max(fmax, 1e-300)) {
                std::ostringstream os;
                os << "locate_ep: indicator for '" << param
                   << "' keeps one sign on the bracket and stays away from zero";
                throw NoSignChangeError(os.str());
            }
            root = v;
        }
    }

    EpLocation loc;
    loc.param_value = root;
    // Cluster tolerance tracks the cube-root sensitivity of multiple roots.
    const auto vals = ind.eigs(root);
    loc.ep_order = detail::largest_cluster(vals, 1e-4 * cluster_scale);
    if (loc.ep_order < 2) loc.ep_order = 2;
    return loc;
}

}  // namespace

EpLocation locate_ep(const TwoModeModel& m, std::string_view param,
                     double lo, double hi) {
    m.validate();
    Indicator ind;
    ind.f = [&m, param](double v) {
        const TwoModeModel mm = with_param(m, param, v);
        const double gm = mm.gamma_minus();
        return mm.j * mm.j - gm * gm;
    };
    ind.eigs = [&m, param](double v) {
        const auto s = eig2_closed_form(with_param(m, param, v));
        std::vector<Complex> out;
        for (const auto& ev : s.eigenvalues) out.push_back(ev.value());
        return out;
    };
    const double scale = std::max({std::abs(m.gamma_minus()), std::abs(m.j),
                                   std::abs(lo), std::abs(hi)});
    return locate_ep_impl(ind, param, lo, hi, scale);
}

EpLocation locate_ep(const ThreeModeModel& m, std::string_view param,
                     double lo, double hi) {
    m.validate();
    Indicator ind;
    ind.f = [&m, param](double v) {
        const auto cc = cubic_coefficients(with_param(m, param, v, true));
        return cubic_discriminant(cc.c2, cc.c1, cc.c0);
    };
    ind.eigs = [&m, param](double v) {
        const auto s = eig3(with_param(m, param, v, true));
        std::vector<Complex> out;
        for (const auto& ev : s.eigenvalues) out.push_back(ev.value());
        return out;
    };
    const double scale = std::max({std::abs(m.gamma_1), std::abs(m.j),
                                   std::abs(m.delta()), std::abs(lo), std::abs(hi)});
    return locate_ep_impl(ind, param, lo, hi, scale);
}

}  // namespace epmech
