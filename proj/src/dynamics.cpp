#include "epmech/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace epmech {

namespace {

constexpr double kPi = std::numbers::pi;

double spectral_radius(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

// RK4 step specialised on the (small, fixed) dimension to keep the inner loop
// free of dynamic-size overhead.
template <int N>
void rk4_run(const Eigen::Matrix<double, N, N>& A, Eigen::Matrix<double, N, 1> x,
             double dt, Eigen::Index n_steps, Trajectory& out) {
    using Vec = Eigen::Matrix<double, N, 1>;
    out.states.row(0) = x.transpose();
    for (Eigen::Index s = 1; s <= n_steps; ++s) {
        const Vec k1 = A * x;
        const Vec k2 = A * (x + 0.5 * dt * k1);
        const Vec k3 = A * (x + 0.5 * dt * k2);
        const Vec k4 = A * (x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (x.cwiseAbs().maxCoeff() > kOverflowThreshold) {
            out.truncated = true;
            out.times.resize(s);
            out.states.conservativeResize(s, Eigen::NoChange);
            return;
        }
        out.states.row(s) = x.transpose();
    }
}

}  // namespace

void InitialState::validate() const {
    const auto n = quadratures.size();
    if (n != 4 && n != 6 && n != 8)
        throw InvalidModelError("InitialState: length must be 4, 6 or 8");
    if (!quadratures.allFinite())
        throw InvalidModelError("InitialState: non-finite entry");
}

Eigen::Index Trajectory::column(std::string_view label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<Eigen::Index>(i);
    throw InvalidModelError("Trajectory: unknown quadrature label '" +
                            std::string(label) + "'");
}

double dt_max_for(const DynamicsMatrix& A) {
    A.validate();
    const double wmax = spectral_radius(A.entries);
    if (wmax == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * kPi / (20.0 * wmax);
}

double default_dt(double omega_b) { return 2.0 * kPi / (200.0 * omega_b); }

Trajectory integrate(const DynamicsMatrix& A, const InitialState& x0,
                     double t_max, double dt) {
    A.validate();
    x0.validate();
    if (x0.quadratures.size() != A.entries.rows())
        throw InvalidModelError("integrate: state length does not match matrix");
    if (!(dt > 0.0) || !(t_max >= dt))
        throw InvalidModelError("integrate: need dt > 0 and t_max >= dt");
    const double dtm = dt_max_for(A);
    if (dt > dtm) {
        std::ostringstream os;
        os << "integrate: dt = " << dt << " exceeds sampling bound " << dtm;
        throw StepTooLargeError(os.str());
    }

    const auto n_steps = static_cast<Eigen::Index>(std::floor(t_max / dt + 1e-9));
    Trajectory out;
    out.labels = A.labels;
    out.times.resize(n_steps + 1);
    for (Eigen::Index s = 0; s <= n_steps; ++s) out.times[s] = s * dt;
    out.states.resize(n_steps + 1, A.entries.rows());

    switch (A.entries.rows()) {
        case 4:
            rk4_run<4>(A.entries, x0.quadratures, dt, n_steps, out);
            break;
        case 6:
            rk4_run<6>(A.entries, x0.quadratures, dt, n_steps, out);
            break;
        default:
            rk4_run<8>(A.entries, x0.quadratures, dt, n_steps, out);
            break;
    }
    return out;
}

Eigen::MatrixXd propagate_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0,
                                const std::vector<double>& times) {
    Eigen::MatrixXd out(times.size(), x0.size());
    if (times.empty()) return out;

    // Uniform grid: one exponential, repeated application. Grids built as
    // fl(s * dt) pass this check; the ~eps * t time jitter they carry perturbs
    // the state by O(||A|| eps t), far below the oracle's accuracy target.
    bool uniform = times.size() >= 3 && times.front() == 0.0;
    if (uniform) {
        const double dt = times[1] - times[0];
        for (size_t i = 1; i + 1 < times.size() && uniform; ++i)
            if (std::abs((times[i + 1] - times[i]) - dt) > 1e-9 * std::abs(dt))
                uniform = false;
        if (uniform && dt > 0.0) {
            const Eigen::MatrixXd E = (A * dt).exp();
            Eigen::VectorXd x = x0;
            out.row(0) = x.transpose();
            for (size_t i = 1; i < times.size(); ++i) {
                x = E * x;
                out.row(i) = x.transpose();
            }
            return out;
        }
    }
    for (size_t i = 0; i < times.size(); ++i)
        out.row(i) = ((A * times[i]).exp() * x0).transpose();
    return out;
}

Trajectory matrix_exponential_oracle(const DynamicsMatrix& A, const InitialState& x0,
                                     const std::vector<double>& times) {
    A.validate();
    x0.validate();
    Trajectory out;
    out.labels = A.labels;
    out.times = times;
    out.states = propagate_exact(A.entries, x0.quadratures, times);
    return out;
}

std::pair<double, double> closed_form_two_mode_k(const TwoModeModel& m, double q10,
                                                 double q20, double t, int k) {
    m.validate();
    using C = std::complex<double>;
    const double gp = m.gamma_plus(), gm = m.gamma_minus(), J = m.j;
    const C omega = std::sqrt(C(J * J - gm * gm, 0.0));
    const C z = omega * t;

    // cos(Om t) and sin(Om t)/Om are even in Om, hence real for Om real or
    // imaginary; near coalescence use their series in z = Om t.
    double cosv, sinv_over;  // cos(Om t), sin(Om t)/Om
    if (std::abs(z) < 1e-6) {
        const C z2 = z * z;
        cosv = (1.0 - z2 / 2.0).real();
        sinv_over = (t * (1.0 - z2 / 6.0)).real();
    } else {
        cosv = std::cos(z).real();
        sinv_over = (std::sin(z) / omega).real();
    }

    const double e = std::exp(-gp * t);
    const double kk = static_cast<double>(k);
    const double cw = std::cos(m.omega_b * t), sw = std::sin(m.omega_b * t);
    const double q1 = e * ((cosv - kk * gm * sinv_over) * cw * q10 -
                           kk * J * sinv_over * sw * q20);
    const double q2 = e * ((cosv + kk * gm * sinv_over) * cw * q20 -
                           kk * J * sinv_over * sw * q10);
    return {q1, q2};
}

std::pair<double, double> closed_form_two_mode(const TwoModeModel& m, double q10,
                                               double q20, double t) {
    return closed_form_two_mode_k(m, q10, q20, t, kClosedFormCoefficient);
}

std::string to_string(GrowthClass g) {
    switch (g) {
        case GrowthClass::ExponentialDecay: return "exponential_decay";
        case GrowthClass::LinearGrowth: return "linear_growth";
        case GrowthClass::ExponentialGrowth: return "exponential_growth";
        case GrowthClass::Oscillatory: return "oscillatory";
    }
    return "oscillatory";
}

std::vector<EnvelopePeak> envelope_peaks(const Trajectory& tr, std::string_view label) {
    const Eigen::Index col = tr.column(label);
    const Eigen::Index n = tr.states.rows();
    std::vector<EnvelopePeak> peaks;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double y0 = std::abs(tr.states(i - 1, col));
        const double y1 = std::abs(tr.states(i, col));
        const double y2 = std::abs(tr.states(i + 1, col));
        if (y1 >= y0 && y1 > y2 && y1 > 0.0) {
            // Parabola through the three samples around the maximum.
            const double denom = y0 - 2.0 * y1 + y2;
            double off = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
            off = std::clamp(off, -1.0, 1.0);
            const double dt = tr.times[i + 1] - tr.times[i];
            peaks.push_back({tr.times[i] + off * dt,
                             y1 - 0.25 * (y0 - y2) * off});
        }
    }
    return peaks;
}

namespace {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0, chi2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.chi2 = ss_res;
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

// First interior local maximum of the unbiased autocorrelation of the
// detrended peak sequence that exceeds the threshold. Lags are capped at half
// the sequence so the noisy large-lag estimates cannot win.
struct AcfPeak {
    bool periodic = false;
    double lag_time = 0.0;
};

AcfPeak envelope_autocorrelation(const std::vector<EnvelopePeak>& peaks,
                                 double threshold) {
    const size_t n = peaks.size();
    AcfPeak result;
    if (n < 8) return result;
    std::vector<double> y(n);
    double mean = 0;
    for (size_t i = 0; i < n; ++i) mean += peaks[i].amplitude;
    mean /= n;
    for (size_t i = 0; i < n; ++i) y[i] = peaks[i].amplitude - mean;
    double var = 0;
    for (double v : y) var += v * v;
    var /= n;
    if (var <= 0) return result;

    const size_t max_lag = n / 2;
    std::vector<double> ac(max_lag + 1, 0.0);
    for (size_t k = 0; k <= max_lag; ++k) {
        double s = 0;
        for (size_t i = 0; i + k < n; ++i) s += y[i] * y[i + k];
        ac[k] = s / ((n - k) * var);
    }
    const double mean_spacing =
        (peaks.back().time - peaks.front().time) / static_cast<double>(n - 1);
    for (size_t k = 2; k + 1 <= max_lag; ++k) {
        if (ac[k] >= ac[k - 1] && ac[k] > ac[k + 1] && ac[k] > threshold) {
            // Parabolic refinement of the lag.
            const double d = ac[k - 1] - 2.0 * ac[k] + ac[k + 1];
            double off = d != 0.0 ? 0.5 * (ac[k - 1] - ac[k + 1]) / d : 0.0;
            off = std::clamp(off, -1.0, 1.0);
            result.periodic = true;
            result.lag_time = (static_cast<double>(k) + off) * mean_spacing;
            return result;
        }
    }
    return result;
}

}  // namespace

EnvelopeFit fit_envelope(const Trajectory& tr, std::string_view mode_label) {
    const auto peaks = envelope_peaks(tr, mode_label);
    if (peaks.size() < 5)
        throw TooShortError("fit_envelope: fewer than 5 envelope peaks for '" +
                            std::string(mode_label) + "'");

    EnvelopeFit fit;
    fit.mode_label = std::string(mode_label);
    for (const auto& p : peaks)
        fit.peak_amplitude = std::max(fit.peak_amplitude, p.amplitude);

    // Carrier frequency estimate: |q| peaks twice per carrier period.
    const double mean_spacing =
        (peaks.back().time - peaks.front().time) / static_cast<double>(peaks.size() - 1);
    const double omega_est = kPi / mean_spacing;

    const auto acf = envelope_autocorrelation(peaks, 0.9);
    if (acf.periodic) {
        fit.growth_class = GrowthClass::Oscillatory;
        fit.rate = 0.0;
        fit.beat_period = acf.lag_time;
        return fit;
    }

    // Rate fits on the late window (first 30% of the span is transient).
    const double t_start =
        peaks.front().time + 0.3 * (peaks.back().time - peaks.front().time);
    std::vector<double> t, y, logy;
    for (const auto& p : peaks) {
        if (p.time < t_start || p.amplitude <= 0.0) continue;
        t.push_back(p.time);
        y.push_back(p.amplitude);
        logy.push_back(std::log(p.amplitude));
    }
    if (t.size() < 3)
        throw TooShortError("fit_envelope: fewer than 3 usable late-window peaks");

    const LineFit exp_fit = fit_line(t, logy);
    const LineFit lin_fit = fit_line(t, y);
    double exp_chi2_raw = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - std::exp(exp_fit.intercept + exp_fit.slope * t[i]);
        exp_chi2_raw += r * r;
    }

    const bool intercept_ok = std::abs(lin_fit.intercept) <= 0.1 * fit.peak_amplitude;
    if (lin_fit.chi2 < exp_chi2_raw && intercept_ok && lin_fit.slope > 0.0) {
        fit.growth_class = GrowthClass::LinearGrowth;
        fit.rate = lin_fit.slope;
        return fit;
    }
    if (exp_fit.r2 >= 0.99 && std::abs(exp_fit.slope) >= 1e-3 * omega_est) {
        fit.growth_class = exp_fit.slope > 0.0 ? GrowthClass::ExponentialGrowth
                                               : GrowthClass::ExponentialDecay;
        fit.rate = exp_fit.slope;
        return fit;
    }
    // Fallback: neither pattern is clean; report the exponential-fit rate.
    fit.growth_class = exp_fit.slope >= 0.0 ? GrowthClass::ExponentialGrowth
                                            : GrowthClass::ExponentialDecay;
    fit.rate = exp_fit.slope;
    return fit;
}

}  // namespace epmech
