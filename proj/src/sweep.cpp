#include "epmech/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <thread>

namespace epmech {

namespace {

Spectrum spectrum_at(const SweepSpec& spec, double value) {
    if (std::holds_alternative<TwoModeModel>(spec.base_model))
        return eig2_closed_form(
            with_param(std::get<TwoModeModel>(spec.base_model), spec.param, value));
    const bool ph = spec.symmetry == SymmetryClass::PseudoHermitian;
    return eig3(with_param(std::get<ThreeModeModel>(spec.base_model), spec.param,
                           value, ph));
}

double min_pairwise(const std::vector<ComplexEigenvalue>& evs) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < evs.size(); ++i)
        for (size_t k = i + 1; k < evs.size(); ++k)
            m = std::min(m, std::abs(evs[i].value() - evs[k].value()));
    return m;
}

struct GridPoint {
    double value;
    Spectrum spectrum;
    double coalescence;
};

GridPoint eval_point(const SweepSpec& spec, double v) {
    GridPoint p;
    p.value = v;
    p.spectrum = spectrum_at(spec, v);
    p.coalescence = min_pairwise(p.spectrum.eigenvalues);
    return p;
}

// All permutations of {0..n-1} for n <= 3; minimal total distance assignment
// reduces to brute force here.
const std::vector<std::vector<int>>& permutations(int n) {
    static const std::vector<std::vector<int>> p2 = {{0, 1}, {1, 0}};
    static const std::vector<std::vector<int>> p3 = {
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    return n == 2 ? p2 : p3;
}

unsigned worker_count(size_t items) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("EPMECH_WORKERS")) {
        const long v = std::atol(env);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    if (n < 1) n = 1;
    return static_cast<unsigned>(std::min<size_t>(n, items));
}

}  // namespace

BranchSet run_sweep(const SweepSpec& spec) {
    if (spec.values.empty())
        throw InvalidModelError("run_sweep: empty parameter grid");
    for (size_t i = 0; i + 1 < spec.values.size(); ++i)
        if (!(spec.values[i] < spec.values[i + 1]))
            throw InvalidModelError("run_sweep: grid must be strictly increasing");
    for (double v : spec.values)
        if (!std::isfinite(v))
            throw InvalidModelError("run_sweep: non-finite grid value");

    std::vector<GridPoint> grid;
    grid.reserve(spec.values.size());
    for (double v : spec.values) grid.push_back(eval_point(spec, v));

    // Scale for coalescence thresholds: the largest eigenvalue magnitude seen.
    double scale = 0.0;
    for (const auto& g : grid)
        for (const auto& ev : g.spectrum.eigenvalues)
            scale = std::max(scale, std::abs(ev.value()));
    const double ep_tol = kEpTolRel * std::max(scale, 1e-300);

    // Refine around coalescence dips: insert 10 points per round, 3 rounds max.
    for (int round = 0; round < 3; ++round) {
        std::vector<GridPoint> inserted;
        for (size_t i = 1; i + 1 < grid.size(); ++i) {
            const bool dip = grid[i].coalescence < grid[i - 1].coalescence &&
                             grid[i].coalescence < grid[i + 1].coalescence;
            if (!dip || grid[i].coalescence <= 10.0 * ep_tol) continue;
            for (int s = 1; s <= 5; ++s) {
                const double f = s / 6.0;
                inserted.push_back(eval_point(
                    spec, grid[i - 1].value + f * (grid[i].value - grid[i - 1].value)));
                inserted.push_back(eval_point(
                    spec, grid[i].value + f * (grid[i + 1].value - grid[i].value)));
            }
        }
        if (inserted.empty()) break;
        grid.insert(grid.end(), inserted.begin(), inserted.end());
        std::sort(grid.begin(), grid.end(),
                  [](const GridPoint& a, const GridPoint& b) { return a.value < b.value; });
        grid.erase(std::unique(grid.begin(), grid.end(),
                               [](const GridPoint& a, const GridPoint& b) {
                                   return a.value == b.value;
                               }),
                   grid.end());
    }

    const size_t n_pts = grid.size();
    const int n_br = static_cast<int>(grid.front().spectrum.eigenvalues.size());

    BranchSet out;
    out.param_values.reserve(n_pts);
    out.branches.assign(n_br, {});
    out.phase_labels.reserve(n_pts);

    // Branch continuation: assign each new spectrum to branches by the
    // permutation with minimal total complex distance to the previous point.
    std::vector<Complex> prev(n_br);
    for (size_t i = 0; i < n_pts; ++i) {
        const auto& evs = grid[i].spectrum.eigenvalues;
        std::vector<int> chosen(n_br);
        if (i == 0) {
            for (int b = 0; b < n_br; ++b) chosen[b] = b;
        } else {
            double best = std::numeric_limits<double>::infinity();
            double second = best;
            const auto& perms = permutations(n_br);
            size_t best_idx = 0;
            for (size_t pi = 0; pi < perms.size(); ++pi) {
                double total = 0.0;
                for (int b = 0; b < n_br; ++b)
                    total += std::abs(evs[perms[pi][b]].value() - prev[b]);
                if (total < best) {
                    second = best;
                    best = total;
                    best_idx = pi;
                } else if (total < second) {
                    second = total;
                }
            }
            // Near-tied assignments happen right at an EP; keep the previous
            // (identity) ordering and flag the point.
            if (second - best <= 1e-12 * std::max(scale, 1e-300)) {
                out.ambiguous_points.push_back(i);
                best_idx = 0;
            }
            chosen = perms[best_idx];
        }
        for (int b = 0; b < n_br; ++b) {
            ComplexEigenvalue ev = evs[chosen[b]];
            ev.branch = b;
            out.branches[b].push_back(ev);
            prev[b] = ev.value();
        }
        out.param_values.push_back(grid[i].value);
        out.phase_labels.push_back(classify_phase(grid[i].spectrum, spec.symmetry));
    }

    for (int b = 0; b < n_br; ++b)
        for (size_t i = 0; i + 1 < n_pts; ++i) {
            const double dv = out.param_values[i + 1] - out.param_values[i];
            const double dl =
                std::abs(out.branches[b][i + 1].value() - out.branches[b][i].value());
            if (dv > 0) out.continuity_bound = std::max(out.continuity_bound, dl / dv);
        }

    // Exceptional points: every coalescence dip is bracketed and handed to the
    // root finder; dips that are merely avoided crossings are skipped.
    std::vector<EpHit> hits;
    for (size_t i = 1; i + 1 < n_pts; ++i) {
        const bool dip = grid[i].coalescence <= grid[i - 1].coalescence &&
                         grid[i].coalescence <= grid[i + 1].coalescence;
        if (!dip) continue;
        try {
            EpLocation loc;
            if (std::holds_alternative<TwoModeModel>(spec.base_model))
                loc = locate_ep(std::get<TwoModeModel>(spec.base_model), spec.param,
                                grid[i - 1].value, grid[i + 1].value);
            else
                loc = locate_ep(std::get<ThreeModeModel>(spec.base_model), spec.param,
                                grid[i - 1].value, grid[i + 1].value);
            hits.push_back({loc.param_value, loc.ep_order});
        } catch (const NoSignChangeError&) {
            // avoided crossing
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const EpHit& a, const EpHit& b) { return a.param_value < b.param_value; });
    for (const auto& h : hits) {
        if (!out.ep_hits.empty() &&
            std::abs(h.param_value - out.ep_hits.back().param_value) <=
                1e-9 * std::max(1.0, std::abs(h.param_value)))
            continue;
        out.ep_hits.push_back(h);
    }
    return out;
}

std::vector<BatchResult> run_dynamics_batch(const std::vector<BatchItem>& items,
                                            double t_max, double dt) {
    std::vector<BatchResult> results(items.size());
    if (items.empty()) return results;

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            BatchResult& r = results[i];
            try {
                r.trajectory = integrate(items[i].matrix, items[i].state, t_max, dt);
                for (const char* label : {"q1", "q2"})
                    r.fits.push_back(fit_envelope(r.trajectory, label));
                r.ok = true;
            } catch (const std::exception& e) {
                r.ok = false;
                r.error = e.what();
            }
        }
    };

    const unsigned n_workers = worker_count(items.size());
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return results;
}

}  // namespace epmech
