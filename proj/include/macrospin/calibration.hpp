#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "macrospin/fields.hpp"
#include "macrospin/montecarlo.hpp"
#include "macrospin/solvers.hpp"

namespace macrospin {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SurrogateMode { window, fictitious };

inline const char* to_string(SurrogateMode m) {
    return m == SurrogateMode::window ? "window" : "fictitious";
}

inline SurrogateMode surrogate_mode_from_string(const std::string& s) {
    if (s == "window") return SurrogateMode::window;
    if (s == "fictitious") return SurrogateMode::fictitious;
    throw CalibrationError("unknown surrogate mode '" + s + "' (expected window|fictitious)");
}

/// A statistical corner the deterministic surrogate must reproduce: the
/// deterministic switching time is matched to this percentile of the
/// stochastic switching-time distribution (mean corner = p50, best = p1,
/// worst = p99, a WER_i corner = quantile 1 - WER_i).
struct CornerTarget {
    std::string name;
    double percentile = 0.5;
};

struct CalibrationProvenance {
    std::string ensemble_digest;
    std::uint64_t seed = 0;
    int n_runs = 0;
};

struct CalibrationResult {
    SurrogateMode mode = SurrogateMode::fictitious;
    std::map<std::string, double> coefficients;      ///< corner name -> c_w or c_f
    std::map<std::string, double> residuals;         ///< corner name -> |rel. time error|
    std::map<std::string, double> target_times;      ///< corner name -> matched MC time [s]
    CalibrationProvenance provenance;
};

/// FNV-1a 64-bit digest, hex-encoded.
inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Digest identifying the ensemble artifact a calibration was regressed
/// against: seed, run count, and every per-run outcome participate.
inline std::string ensemble_digest(const EnsembleConfig& cfg,
                                   const std::vector<RunOutcome>& outcomes) {
    std::string acc = std::to_string(cfg.master_seed) + "/" + std::to_string(cfg.n_runs);
    char buf[64];
    for (const auto& o : outcomes) {
        std::snprintf(buf, sizeof buf, "|%d:%.17g", o.switched ? 1 : 0, o.switch_time);
        acc += buf;
    }
    return fnv1a_hex(acc);
}

/// The deterministic replay of a stochastic scenario: same device, drive and
/// horizon, thermal noise replaced by the chosen surrogate with coefficient c.
/// Window mode starts at theta0' (the window edge), fictitious mode at theta0;
/// both run the adaptive scheme, matching how the corners are consumed.
inline Scenario corner_scenario(const Scenario& base, SurrogateMode mode, double c) {
    Scenario sc = base;
    sc.solver.scheme = Scheme::adaptive_rk;
    sc.solver.log_steps = false;
    if (mode == SurrogateMode::window) {
        sc.thermal.mode = ThermalMode::off;
        sc.window.enabled = true;
        sc.window.c_w = c;
        sc.window.theta0_prime = c * base.derived.theta0;
        sc.initial = {sc.window.theta0_prime, 0.0};
    } else {
        sc.window.enabled = false;
        sc.thermal.mode = ThermalMode::fictitious;
        sc.thermal.c_f = c;
        sc.initial = {base.derived.theta0, 0.0};
    }
    return sc;
}

namespace detail {

/// Switching time of the deterministic corner run, with t_end as the
/// no-switch sentinel (keeps the bisection objective defined and monotone).
inline double corner_switch_time(const Scenario& base, SurrogateMode mode, double c,
                                 const PhysicalConstants& pc) {
    if (c == 0.0 && mode == SurrogateMode::window) {
        // theta0' = 0 puts the start exactly on the theta = 0 fixed point.
        return base.solver.t_end;
    }
    const Trajectory tr = simulate(corner_scenario(base, mode, c), 0, pc);
    if (!tr.switched()) return base.solver.t_end;
    return *tr.switch_time();
}

} // namespace detail

/// Percentile of the per-run switching times restricted to switched runs.
/// Errors when no run switched (the target statistic is undefined).
inline double switch_time_percentile(const std::vector<RunOutcome>& outcomes, double p) {
    std::vector<double> times;
    for (const auto& o : outcomes)
        if (o.switched) times.push_back(o.switch_time);
    if (times.empty())
        throw CalibrationError("target percentile undefined: no switched runs in the ensemble");
    std::sort(times.begin(), times.end());
    return percentile_nearest_rank(times, p);
}

struct CalibrationOptions {
    double bracket_lo = 0.0;
    /// 0 = auto. Window mode: 4.0. Fictitious mode: 95% of the supercritical
    /// threshold alpha*H_k_eff/(2*sigma_ref) above which the surrogate field
    /// alone drives theta over the equator and switching parity is undefined.
    double bracket_hi = 0.0;
    double rel_tol = 0.01;
    int max_iterations = 60;
};

/// Scalar bisection per corner: find c such that the deterministic switching
/// time matches the corner's target percentile of the ensemble within
/// rel_tol. `scenario` is the stochastic ensemble scenario; the surrogate
/// replacement is applied internally via corner_scenario().
inline CalibrationResult calibrate(SurrogateMode mode, const std::vector<CornerTarget>& targets,
                                   const EnsembleResult& ensemble, const EnsembleConfig& ecfg,
                                   const Scenario& scenario, const CalibrationOptions& opt = {},
                                   const PhysicalConstants& pc = {}) {
    if (targets.empty()) throw CalibrationError("calibrate: empty corner target list");
    for (const auto& tgt : targets)
        if (!(tgt.percentile > 0.0 && tgt.percentile < 1.0))
            throw CalibrationError("corner '" + tgt.name + "': percentile must be in (0, 1)");

    CalibrationResult res;
    res.mode = mode;
    res.provenance.ensemble_digest = ensemble_digest(ecfg, ensemble.outcomes);
    res.provenance.seed = ecfg.master_seed;
    res.provenance.n_runs = ecfg.n_runs;

    double hi_default = 4.0;
    if (mode == SurrogateMode::fictitious) {
        const double sigma_ref =
            thermal_field_scale(scenario.device, scenario.derived, scenario.thermal.dt_ref, pc,
                                scenario.thermal.literal_scale);
        if (!(sigma_ref > 0.0))
            throw CalibrationError("fictitious-mode calibration needs temperature > 0");
        hi_default = 0.95 * scenario.device.alpha * scenario.derived.h_k_eff / (2.0 * sigma_ref);
    }
    const double c_lo_0 = opt.bracket_lo;
    const double c_hi_0 = opt.bracket_hi > 0.0 ? opt.bracket_hi : hi_default;

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    for (const auto& tgt : targets) {
        const double target = switch_time_percentile(ensemble.outcomes, tgt.percentile);
        double lo = c_lo_0, hi = c_hi_0;
        const double t_lo = detail::corner_switch_time(scenario, mode, lo, pc);
        const double t_hi = detail::corner_switch_time(scenario, mode, hi, pc);
        // Larger coefficient -> larger standing cone angle -> faster switch,
        // so the bracket must straddle the target from above and below.
        if (!(t_lo > target && t_hi < target))
            throw CalibrationError("corner '" + tgt.name +
                                   "' unreachable: switching time spans [" + fmt(t_hi) + ", " +
                                   fmt(t_lo) + "] s over c in [" + fmt(lo) + ", " + fmt(hi) +
                                   "], target " + fmt(target) + " s lies outside");

        bool converged = false;
        double c = 0.0, t_c = 0.0;
        for (int it = 0; it < opt.max_iterations; ++it) {
            c = 0.5 * (lo + hi);
            t_c = detail::corner_switch_time(scenario, mode, c, pc);
            if (std::abs(t_c - target) <= opt.rel_tol * target) {
                converged = true;
                break;
            }
            (t_c > target ? lo : hi) = c;
        }
        if (!converged)
            throw CalibrationError("corner '" + tgt.name + "' did not converge to " +
                                   fmt(opt.rel_tol) + " rel. tol within " +
                                   std::to_string(opt.max_iterations) + " bisection iterations");
        res.coefficients[tgt.name] = c;
        res.residuals[tgt.name] = std::abs(t_c - target) / target;
        res.target_times[tgt.name] = target;
    }
    return res;
}

/// Corner parameter file (JSON). Consumed by the simulate driver
/// (--corner <name>) and by the model emitter.
inline std::string corner_library_export(const CalibrationResult& result) {
    nlohmann::json j;
    j["mode"] = to_string(result.mode);
    j["provenance"] = {{"ensemble_digest", result.provenance.ensemble_digest},
                       {"seed", result.provenance.seed},
                       {"n_runs", result.provenance.n_runs}};
    for (const auto& [name, c] : result.coefficients) {
        j["corners"][name] = {{"coefficient", c},
                              {"residual", result.residuals.at(name)},
                              {"target_time", result.target_times.at(name)}};
    }
    return j.dump(2) + "\n";
}

inline CalibrationResult corner_library_import(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CalibrationError(std::string("corner library parse failure: ") + e.what());
    }
    CalibrationResult res;
    try {
        res.mode = surrogate_mode_from_string(j.at("mode").get<std::string>());
        const auto& prov = j.at("provenance");
        res.provenance.ensemble_digest = prov.at("ensemble_digest").get<std::string>();
        res.provenance.seed = prov.at("seed").get<std::uint64_t>();
        res.provenance.n_runs = prov.at("n_runs").get<int>();
        for (const auto& [name, entry] : j.at("corners").items()) {
            res.coefficients[name] = entry.at("coefficient").get<double>();
            res.residuals[name] = entry.at("residual").get<double>();
            res.target_times[name] = entry.at("target_time").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw CalibrationError(std::string("corner library missing field: ") + e.what());
    }
    if (res.coefficients.empty()) throw CalibrationError("corner library has no corners");
    return res;
}

} // namespace macrospin
