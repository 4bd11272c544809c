// Monte Carlo write-error-rate estimate for a single write pulse.
//
// Runs a small stochastic ensemble at a fixed current and prints the error
// rate with its Wilson 95% interval, plus switching-time percentiles.

#include <cstdio>

#include "macrospin/macrospin.hpp"

using namespace macrospin;

int main() {
    Scenario sc;
    sc.device.ms = 1.2e6;
    sc.device.alpha = 0.01;
    sc.device.gamma = 1.76e11;
    sc.device.p_spin = 0.75;
    sc.device.ki = 1.0e-3;
    sc.device.t_fl = 1.0e-9;
    sc.device.t_ox = 1.0e-9;
    sc.device.diameter = 50e-9;
    sc.device.temperature = 300;
    sc.device.r_p = 3.0e3;
    sc.device.r_ap = 6.0e3;
    validate(sc.device);
    sc.derived = derive(sc.device);

    sc.conduction.r_p = sc.device.r_p;
    sc.conduction.r_ap = sc.device.r_ap;
    sc.drive.current = Waveform::constant(35e-6);
    sc.solver.scheme = Scheme::stochastic_heun;
    sc.solver.dt = 1e-12;
    sc.solver.t_end = 20e-9;
    sc.thermal.mode = ThermalMode::stochastic;
    sc.initial = {sc.derived.theta0, 0.0};

    EnsembleConfig ens;
    ens.n_runs = 200;
    ens.master_seed = 42;

    const EnsembleResult res = run_ensemble(sc, ens);
    const EnsembleStats& st = res.stats;
    std::printf("%d runs: %d switched, WER=%.4f  (95%% CI [%.4f, %.4f])\n", st.n_total,
                st.n_switched, st.wer, st.wer_lo, st.wer_hi);
    std::printf("switching time percentiles: p1=%.2f ns  p50=%.2f ns  p99=%.2f ns\n",
                st.switch_times.p1 * 1e9, st.switch_times.p50 * 1e9, st.switch_times.p99 * 1e9);
    return 0;
}
