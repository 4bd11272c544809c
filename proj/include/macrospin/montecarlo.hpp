#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "macrospin/solvers.hpp"

namespace macrospin {

class EnsembleError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

struct EnsembleConfig {
    int n_runs = 1;
    std::uint64_t master_seed = 0;
    int workers = 0; ///< 0 = hardware concurrency
};

struct RunOutcome {
    int run_index = 0;
    bool switched = false;
    double switch_time = std::numeric_limits<double>::quiet_NaN(); ///< s, NaN if none
    double theta_sq_time_avg = std::numeric_limits<double>::quiet_NaN();
    double final_mz = 0.0;
};

struct SwitchTimePercentiles {
    double p1 = std::numeric_limits<double>::quiet_NaN();
    double p5 = std::numeric_limits<double>::quiet_NaN();
    double p50 = std::numeric_limits<double>::quiet_NaN();
    double p95 = std::numeric_limits<double>::quiet_NaN();
    double p99 = std::numeric_limits<double>::quiet_NaN();
};

struct EnsembleStats {
    int n_total = 0;
    int n_switched = 0;
    double wer = 0.0; ///< P(no switch)
    double wer_lo = 0.0, wer_hi = 0.0; ///< Wilson 95% interval
    SwitchTimePercentiles switch_times;
    double theta_sq_mean = std::numeric_limits<double>::quiet_NaN(); ///< over all runs
};

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<RunOutcome> outcomes; ///< in run-index order
};

/// Wilson 95% score interval for k successes out of n.
inline std::pair<double, double> wilson_interval(int k, int n) {
    if (n <= 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054; // 97.5th normal percentile
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // At the boundaries the score interval closes exactly; compute it that
    // way rather than leaving a rounding-order residue.
    const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = k == n ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

/// Nearest-rank percentile of an ascending-sorted sample; p in (0, 1).
inline double percentile_nearest_rank(const std::vector<double>& sorted_ascending, double p) {
    if (sorted_ascending.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto n = sorted_ascending.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted_ascending[rank - 1];
}

inline EnsembleStats aggregate_outcomes(const std::vector<RunOutcome>& outcomes) {
    EnsembleStats st;
    st.n_total = static_cast<int>(outcomes.size());
    std::vector<double> times;
    double tsq_sum = 0.0;
    int tsq_n = 0;
    for (const auto& o : outcomes) { // fixed run-index order: bit-stable sums
        if (o.switched) {
            ++st.n_switched;
            times.push_back(o.switch_time);
        }
        if (std::isfinite(o.theta_sq_time_avg)) {
            tsq_sum += o.theta_sq_time_avg;
            ++tsq_n;
        }
    }
    const int failures = st.n_total - st.n_switched;
    st.wer = st.n_total > 0 ? static_cast<double>(failures) / st.n_total : 0.0;
    std::tie(st.wer_lo, st.wer_hi) = wilson_interval(failures, st.n_total);
    std::sort(times.begin(), times.end());
    st.switch_times.p1 = percentile_nearest_rank(times, 0.01);
    st.switch_times.p5 = percentile_nearest_rank(times, 0.05);
    st.switch_times.p50 = percentile_nearest_rank(times, 0.50);
    st.switch_times.p95 = percentile_nearest_rank(times, 0.95);
    st.switch_times.p99 = percentile_nearest_rank(times, 0.99);
    if (tsq_n > 0) st.theta_sq_mean = tsq_sum / tsq_n;
    return st;
}

/// Run n independent stochastic trajectories with RNG streams split from the
/// master seed by run index. Aggregation happens in run-index order after all
/// workers join, so the statistics are bit-identical for any worker count.
inline EnsembleResult run_ensemble(const Scenario& scenario, const EnsembleConfig& cfg,
                                   const PhysicalConstants& pc = {}) {
    if (cfg.n_runs < 1) throw std::invalid_argument("ensemble.n_runs must be >= 1");
    Scenario sc = scenario;
    sc.solver.seed = cfg.master_seed;
    sc.solver.log_steps = false;
    // Ensemble runs are consumed through their outcomes; cap the per-run
    // trajectory records so 10^4-run ensembles stay in memory.
    const double n_steps = sc.solver.t_end / sc.solver.dt;
    if (sc.solver.scheme != Scheme::adaptive_rk)
        sc.solver.record_stride =
            std::max(sc.solver.record_stride, static_cast<int>(n_steps / 64.0));
    validate(sc);

    const int n = cfg.n_runs;
    int workers = cfg.workers > 0 ? cfg.workers
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n);

    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(n));
    std::vector<std::optional<std::string>> failures(static_cast<std::size_t>(n));
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                const Trajectory tr = simulate(sc, static_cast<std::uint64_t>(i), pc);
                RunOutcome& o = outcomes[static_cast<std::size_t>(i)];
                o.run_index = i;
                o.switched = tr.switched();
                o.switch_time = tr.switch_time().value_or(std::numeric_limits<double>::quiet_NaN());
                o.theta_sq_time_avg = tr.theta_sq_time_avg;
                o.final_mz = tr.mz(tr.states.size() - 1);
            } catch (const std::exception& e) {
                failures[static_cast<std::size_t>(i)] = e.what();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::string failed;
    for (int i = 0; i < n; ++i) {
        if (failures[static_cast<std::size_t>(i)]) {
            if (!failed.empty()) failed += "; ";
            failed += "run " + std::to_string(i) + " (seed " + std::to_string(cfg.master_seed) +
                      ", stream " + std::to_string(i) + "): " + *failures[static_cast<std::size_t>(i)];
        }
    }
    if (!failed.empty()) throw EnsembleError("ensemble member failure: " + failed);

    EnsembleResult res;
    res.outcomes = std::move(outcomes);
    res.stats = aggregate_outcomes(res.outcomes);
    return res;
}

struct WerPoint {
    double value = 0.0; ///< swept quantity (pulse width or current)
    EnsembleStats stats;
};

/// One ensemble per grid point; `make` maps a grid value to a Scenario.
/// A statistically significant WER increase along the grid is reported as a
/// warning string, never an error.
template <class ScenarioFactory>
inline std::vector<WerPoint> wer_curve(const EnsembleConfig& cfg, const std::vector<double>& grid,
                                       ScenarioFactory&& make,
                                       std::vector<std::string>* warnings = nullptr,
                                       const PhysicalConstants& pc = {}) {
    if (grid.empty()) throw std::invalid_argument("wer_curve: empty sweep grid");
    std::vector<WerPoint> out;
    out.reserve(grid.size());
    for (double v : grid) {
        const Scenario sc = make(v);
        out.push_back({v, run_ensemble(sc, cfg, pc).stats});
    }
    if (warnings) {
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (out[i].stats.wer_lo > out[i - 1].stats.wer_hi)
                warnings->push_back("WER rises significantly between sweep points " +
                                    std::to_string(out[i - 1].value) + " and " +
                                    std::to_string(out[i].value));
        }
    }
    return out;
}

} // namespace macrospin
