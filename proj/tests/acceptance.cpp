// Release gate. Each numbered criterion prints one PASS/FAIL line with the
// measured values and the pinned tolerance; the process exits nonzero if any
// check fails. Scenarios are loaded from the shipped configs so this binary
// exercises exactly what users run.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "macrospin/macrospin.hpp"

using namespace macrospin;

namespace {

int failures = 0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void report(int idx, bool ok, const std::string& detail) {
    std::printf("[criterion %2d] %s  %s\n", idx, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void guarded(int idx, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(idx, false, fmt("unexpected exception: %s", e.what()));
    }
}

SimConfig shipped_config(const char* name) {
    return load_config(std::string(MACROSPIN_CONFIG_DIR) + "/" + name);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool bits_equal(double a, double b) {
    std::uint64_t x = 0, y = 0;
    std::memcpy(&x, &a, sizeof x);
    std::memcpy(&y, &b, sizeof y);
    return x == y;
}

} // namespace

int main() {
    std::printf("macrospin %s acceptance checks\n", version());

    // Shared between criteria 1 and 2: the 35 uA deterministic write and its
    // 1 fs fixed-step reference solution.
    Trajectory write35_adaptive, write35_reference;
    double write35_rmse = -1.0;
    Scenario write35;

    // --- 1: deterministic switching accuracy and runtime ---------------------
    guarded(1, [&] {
        write35 = make_scenario(shipped_config("write_35ua.json"));
        const auto t0 = std::chrono::steady_clock::now();
        write35_adaptive = simulate(write35);
        const double solve_s = seconds_since(t0);
        write35_reference = reference_trajectory(write35); // 1 fs stochastic-Heun drift
        write35_rmse = rmse_mz(write35_adaptive, write35_reference);
        const bool switched = write35_adaptive.switched();
        const double t_sw = switched ? *write35_adaptive.switch_time() : -1.0;
        const bool ok = switched && write35_rmse < 0.01 && solve_s < 60.0;
        report(1, ok,
               fmt("35 uA write: switched=%s, switch_time=%.4g s, rmse_mz=%.3e (limit 1e-2), "
                   "solve=%.2f s (limit 60)",
                   switched ? "yes" : "no", t_sw, write35_rmse, solve_s));
    });

    // --- 2: naive Euler pays >=100x the evaluations for worse accuracy -------
    guarded(2, [&] {
        Scenario e = write35;
        e.solver.scheme = Scheme::naive_euler;
        e.solver.dt = 1e-12; // 1 ps
        const Trajectory euler = simulate(e);
        const double euler_rmse = rmse_mz(euler, write35_reference);
        const double ratio = static_cast<double>(euler.rhs_evaluations) /
                             static_cast<double>(write35_adaptive.rhs_evaluations);
        const bool ok = ratio >= 100.0 && euler_rmse > write35_rmse;
        report(2, ok,
               fmt("1 ps Euler: %zu evals vs adaptive %zu (ratio %.1fx, need >=100), "
                   "rmse %.3e vs %.3e (must be larger)",
                   euler.rhs_evaluations, write35_adaptive.rhs_evaluations, ratio, euler_rmse,
                   write35_rmse));
    });

    // --- 3: step-size collapse and recovery across the pole ------------------
    guarded(3, [&] {
        const Trajectory tr = simulate(make_scenario(shipped_config("near_pole_start.json")));
        double min_early = std::numeric_limits<double>::infinity();
        double max_late = 0.0;
        for (const auto& st : tr.steps) {
            if (st.t <= 2e-9) min_early = std::min(min_early, st.dt);
            if (st.t >= 10e-9) max_late = std::max(max_late, st.dt);
        }
        const bool ok = tr.steps_rejected >= 1 && min_early <= max_late / 10.0;
        report(3, ok,
               fmt("near-pole start: min dt(t<2ns)=%.3g s, max dt(t>10ns)=%.3g s "
                   "(ratio %.0fx, need >=10), rejected=%zu (need >=1), no tolerance failure",
                   min_early, max_late, max_late / min_early, tr.steps_rejected));
    });

    // --- 4: stochastic ensemble thermalizes to <theta^2> = 1/Delta -----------
    guarded(4, [&] {
        const SimConfig c = shipped_config("thermal_equilibrium.json");
        const Scenario sc = make_scenario(c);
        const auto t0 = std::chrono::steady_clock::now();
        const EnsembleResult r = run_ensemble(sc, c.ensemble);
        const double rel = r.stats.theta_sq_mean * sc.derived.delta - 1.0;
        const bool ok = std::abs(rel) <= 0.10;
        report(4, ok,
               fmt("%d runs x %.0f ns: <theta^2>*Delta-1 = %+.3f (limit +-0.10), %.0f s",
                   r.stats.n_total, sc.solver.t_end * 1e9, rel, seconds_since(t0)));
    });

    // --- 5: thermal field magnitude and step-size scaling ---------------------
    guarded(5, [&] {
        const Scenario sc = write35;
        const int n = 100000;
        const double dt1 = 1e-12, dt4 = 4e-12;
        const double sigma1 = thermal_field_scale(sc.device, sc.derived, dt1);
        const double sigma4 = thermal_field_scale(sc.device, sc.derived, dt4);
        CounterRng rng(424242, 0);
        double ss1 = 0.0, ss4 = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vec3 h1 = h_thermal_sample(rng, dt1, sc.device, sc.derived);
            const Vec3 h4 = h_thermal_sample(rng, dt4, sc.device, sc.derived);
            ss1 += dot(h1, h1);
            ss4 += dot(h4, h4);
        }
        const double var1 = ss1 / (3.0 * n), var4 = ss4 / (3.0 * n);
        const double var_rel = var1 / (sigma1 * sigma1) - 1.0;
        const double sd_ratio = std::sqrt(var1 / var4);
        const bool ok = std::abs(var_rel) <= 0.03 && std::abs(sd_ratio - 2.0) <= 0.05 * 2.0 &&
                        std::abs(sigma1 / sigma4 - 2.0) < 1e-12;
        report(5, ok,
               fmt("1e5 draws: var(1ps)/sigma^2-1 = %+.4f (limit +-0.03), "
                   "sd(1ps)/sd(4ps) = %.4f (2 +- 5%%)",
                   var_rel, sd_ratio));
    });

    // --- 6: window floor preserves back-to-back write transitions ------------
    guarded(6, [&] {
        const SimConfig c = shipped_config("double_write.json");
        const double start1 = 5e-9, start2 = 65e-9; // pulse starts from the config

        const Scenario with_window = make_scenario(c);
        const Trajectory on = simulate(with_window);

        Scenario no_window = with_window;
        no_window.window.enabled = false;
        no_window.initial.theta = with_window.derived.theta0;
        const Trajectory off = simulate(no_window);

        std::string detail;
        bool ok = false;
        if (on.events.size() == 2) {
            const double d1 = on.events[0].t - start1;
            const double d2 = on.events[1].t - start2;
            const double mismatch = std::abs(d2 - d1) / d1;
            ok = off.events.size() < 2 && mismatch <= 0.02;
            detail = fmt("window on: transitions %.4g / %.4g s (mismatch %.2f%%, limit 2%%); "
                         "window off: %zu event(s) (need <2)",
                         d1, d2, 100.0 * mismatch, off.events.size());
        } else {
            detail = fmt("window on: expected 2 switching events, got %zu", on.events.size());
        }
        report(6, ok, detail);
    });

    // --- 7: surrogate calibration reproduces the Monte Carlo median ----------
    CalibrationResult cal_fict; // reused by criterion 9
    bool have_cal = false;
    guarded(7, [&] {
        const SimConfig c = shipped_config("calibration.json");
        const Scenario sc = make_scenario(c);
        const auto t0 = std::chrono::steady_clock::now();
        const EnsembleResult mc = run_ensemble(sc, c.ensemble);
        const double p50 = switch_time_percentile(mc.outcomes, 0.5);
        const std::vector<CornerTarget> mean_corner{{"mean", 0.5}};

        cal_fict = calibrate(SurrogateMode::fictitious, mean_corner, mc, c.ensemble, sc);
        const CalibrationResult cal_win =
            calibrate(SurrogateMode::window, mean_corner, mc, c.ensemble, sc);
        have_cal = true;
        const double rf = cal_fict.residuals.at("mean");
        const double rw = cal_win.residuals.at("mean");
        const bool ok = rf <= 0.05 && rw <= 0.05;
        report(7, ok,
               fmt("MC p50=%.4g s (%d runs); c_f=%.4g (residual %.2f%%), c_w=%.4g "
                   "(residual %.2f%%), limit 5%%, %.0f s",
                   p50, mc.stats.n_total, cal_fict.coefficients.at("mean"), 100.0 * rf,
                   cal_win.coefficients.at("mean"), 100.0 * rw, seconds_since(t0)));
    });

    // --- 8: ensembles are bit-identical for any worker count ------------------
    guarded(8, [&] {
        const SimConfig c = shipped_config("calibration.json");
        const Scenario sc = make_scenario(c);
        EnsembleConfig ecfg = c.ensemble;
        ecfg.n_runs = 64;
        std::vector<EnsembleResult> results;
        for (int workers : {1, 4, 16}) {
            ecfg.workers = workers;
            results.push_back(run_ensemble(sc, ecfg));
        }
        bool identical = true;
        for (std::size_t w = 1; w < results.size(); ++w) {
            const auto& a = results[0].outcomes;
            const auto& b = results[w].outcomes;
            if (a.size() != b.size()) identical = false;
            for (std::size_t i = 0; identical && i < a.size(); ++i)
                identical = a[i].switched == b[i].switched &&
                            bits_equal(a[i].switch_time, b[i].switch_time) &&
                            bits_equal(a[i].theta_sq_time_avg, b[i].theta_sq_time_avg) &&
                            bits_equal(a[i].final_mz, b[i].final_mz);
            identical = identical &&
                        bits_equal(results[0].stats.wer, results[w].stats.wer) &&
                        bits_equal(results[0].stats.theta_sq_mean, results[w].stats.theta_sq_mean);
        }
        report(8, identical,
               fmt("64 runs, seed %llu: outcomes bit-identical at workers {1, 4, 16}: %s",
                   static_cast<unsigned long long>(ecfg.master_seed),
                   identical ? "yes" : "NO"));
    });

    // --- 9: compact-model emission round-trips -------------------------------
    guarded(9, [&] {
        if (!have_cal) {
            report(9, false, "skipped: criterion 7 produced no corner library");
            return;
        }
        const SimConfig c = shipped_config("calibration.json");
        const std::string text = emit_model(c.device, cal_fict, {});
        const std::string text2 = emit_model(c.device, cal_fict, {});
        const auto problems = lint_model(text);

        const auto params = parse_parameters(text);
        DeviceParams dev = c.device;
        const DerivedQuantities q = derive(dev);
        double max_rel = 0.0;
        const std::vector<std::pair<const char*, double>> expect = {
            {"ms", c.device.ms},       {"alpha", c.device.alpha},
            {"gamma", c.device.gamma}, {"p_spin", c.device.p_spin},
            {"ki", c.device.ki},       {"t_fl", c.device.t_fl},
            {"diameter", c.device.diameter}, {"temperature", c.device.temperature},
            {"r_p", c.device.r_p},     {"r_ap", c.device.r_ap},
            {"volume", q.volume},      {"demag_nz", q.demag.z},
        };
        for (const auto& [name, value] : expect) {
            const auto it = params.find(name);
            if (it == params.end()) {
                max_rel = std::numeric_limits<double>::infinity();
                break;
            }
            max_rel = std::max(max_rel, std::abs(it->second - value) / std::abs(value));
        }
        std::size_t n_idtmod = 0;
        for (std::size_t pos = text.find("idtmod("); pos != std::string::npos;
             pos = text.find("idtmod(", pos + 1))
            ++n_idtmod;

        const bool ok = problems.empty() && text == text2 && max_rel <= 1e-12 && n_idtmod == 1;
        report(9, ok,
               fmt("lints=%zu (need 0), byte-identical re-emission=%s, parameter round-trip "
                   "max rel err=%.1e (limit 1e-12), idtmod count=%zu (need 1)",
                   problems.size(), text == text2 ? "yes" : "NO", max_rel, n_idtmod));
    });

    // --- 10: excluded ---------------------------------------------------------
    std::printf("[criterion 10] EXCLUDED  array-level (1-Mb macro) runtime/memory comparison: "
                "needs a proprietary extracted netlist and a commercial analog simulator; "
                "the model features it exercises are covered by criteria 6-9\n");

    if (failures == 0)
        std::printf("acceptance: all 9 runnable criteria passed (1 excluded)\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
