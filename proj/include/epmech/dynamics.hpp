#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epmech/model.hpp"

// Time-domain propagation of the quadrature equations of motion: fixed-step
// RK4, the exact matrix-exponential propagator used as ground truth, the
// closed-form two-mode solution for p(0) = 0, and envelope-growth diagnostics.

namespace epmech {

/// Coefficient constant in the closed-form two-mode solution, resolved against
/// the matrix-exponential propagator (see closed_form_two_mode_k).
inline constexpr int kClosedFormCoefficient = 1;

/// Overflow threshold: integration truncates once any |state| exceeds this.
inline constexpr double kOverflowThreshold = 1e100;

struct InitialState {
    Eigen::VectorXd quadratures;  // ordered like DynamicsMatrix::labels

    void validate() const;  // finite, length in {4, 6, 8}
};

struct Trajectory {
    std::vector<double> times;   // strictly increasing
    Eigen::MatrixXd states;      // one row per time, one column per quadrature
    std::vector<std::string> labels;
    bool truncated = false;      // gain blow-up hit kOverflowThreshold

    Eigen::Index column(std::string_view label) const;  // throws if unknown
};

/// Largest sampling step 2*pi / (20 * max|eigenvalue(A)|).
double dt_max_for(const DynamicsMatrix& A);

/// Default integration step, 200 samples per carrier period.
double default_dt(double omega_b);

/// Classical fixed-step RK4 for d/dt x = A x, sampled every dt up to t_max.
/// Throws StepTooLargeError if dt > dt_max_for(A). On overflow the trajectory
/// is truncated and flagged instead of throwing.
Trajectory integrate(const DynamicsMatrix& A, const InitialState& x0,
                     double t_max, double dt);

/// Exact propagation x(t) = exp(A t) x0 at the given times (scaling-and-squaring
/// Pade exponential; uniform grids reuse exp(A dt) by repeated application).
/// Accuracy target 1e-12 relative for ||A|| t up to ~1e3.
Trajectory matrix_exponential_oracle(const DynamicsMatrix& A, const InitialState& x0,
                                     const std::vector<double>& times);

/// Raw-matrix variant of the oracle: rows of the result are x(times[i]).
Eigen::MatrixXd propagate_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0,
                                const std::vector<double>& times);

/// Closed-form (q1(t), q2(t)) for p1(0) = p2(0) = 0:
///   q1 = e^{-gp t} { [cos(Om t) - k (gm/Om) sin(Om t)] cos(wb t) q10
///                    - k (J/Om) sin(Om t) sin(wb t) q20 },
/// and q2 with q10 <-> q20 and gm -> -gm (the 1 <-> 2 exchange). Om may be
/// real or imaginary; sin(Om t)/Om and cos(Om t) switch to their series for
/// |Om t| < 1e-6, which removes the coalescence singularity.
std::pair<double, double> closed_form_two_mode_k(const TwoModeModel& m, double q10,
                                                 double q20, double t, int k);

/// closed_form_two_mode_k with the resolved coefficient kClosedFormCoefficient.
std::pair<double, double> closed_form_two_mode(const TwoModeModel& m, double q10,
                                               double q20, double t);

enum class GrowthClass { ExponentialDecay, LinearGrowth, ExponentialGrowth, Oscillatory };

std::string to_string(GrowthClass g);

struct EnvelopeFit {
    std::string mode_label;
    GrowthClass growth_class = GrowthClass::Oscillatory;
    double rate = 0.0;             // exponential rate (signed) or linear slope
    double peak_amplitude = 0.0;   // max refined |q| peak
    std::optional<double> beat_period;  // only for Oscillatory
};

/// One refined local maximum of |q(t)|.
struct EnvelopePeak {
    double time = 0.0;
    double amplitude = 0.0;
};

/// Local maxima of |q| with three-point parabolic refinement.
std::vector<EnvelopePeak> envelope_peaks(const Trajectory& tr, std::string_view label);

/// Classify the envelope of one quadrature. Thresholds (documented here, fixed
/// project-wide): Oscillatory when the detrended peak autocorrelation has an
/// interior local maximum > 0.9 within half the peak count (unbiased
/// normalization); LinearGrowth when the linear fit beats the exponential fit
/// in raw-residual chi^2 with |intercept| <= 0.1 * max peak and positive slope;
/// Exponential growth/decay when the log-peak fit has R^2 >= 0.99 and |rate| >=
/// 1e-3 * carrier frequency. Rate fits drop the first 30% of the time span to
/// discard the transient. Throws TooShortError for fewer than 5 peaks.
EnvelopeFit fit_envelope(const Trajectory& tr, std::string_view mode_label);

}  // namespace epmech
