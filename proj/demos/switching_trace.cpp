// Minimal library usage: build a perpendicular MTJ, drive it with a constant
// write current, and print the switching trajectory summary.

#include <cstdio>

#include "macrospin/macrospin.hpp"

using namespace macrospin;

int main() {
    Scenario sc;
    sc.device.ms = 1.2e6;        // A/m
    sc.device.alpha = 0.01;
    sc.device.gamma = 1.76e11;   // rad/(s*T)
    sc.device.p_spin = 0.75;
    sc.device.ki = 1.0e-3;       // J/m^2
    sc.device.t_fl = 1.0e-9;     // m
    sc.device.t_ox = 1.0e-9;     // m
    sc.device.diameter = 50e-9;  // m
    sc.device.temperature = 300; // K
    sc.device.r_p = 3.0e3;       // ohm
    sc.device.r_ap = 6.0e3;      // ohm
    validate(sc.device);
    sc.derived = derive(sc.device);

    sc.conduction.r_p = sc.device.r_p;
    sc.conduction.r_ap = sc.device.r_ap;
    sc.drive.current = Waveform::constant(35e-6); // A; positive writes AP
    sc.solver.scheme = Scheme::adaptive_rk;
    sc.solver.t_end = 50e-9;
    sc.initial = {sc.derived.theta0, 0.0}; // thermal cone angle

    std::printf("device: Delta=%.1f  H_k_eff=%.4g A/m  theta0=%.4f rad\n", sc.derived.delta,
                sc.derived.h_k_eff, sc.derived.theta0);

    const Trajectory tr = simulate(sc);
    std::printf("%zu recorded samples, %zu RHS evaluations (%zu accepted / %zu rejected steps)\n",
                tr.times.size(), tr.rhs_evaluations, tr.steps_accepted, tr.steps_rejected);
    for (std::size_t i = 0; i < tr.times.size(); i += tr.times.size() / 10)
        std::printf("  t=%6.2f ns  m_z=%+.4f  R=%.0f ohm\n", tr.times[i] * 1e9, tr.mz(i),
                    tr.resistance[i]);
    if (tr.switch_time())
        std::printf("switched P->AP at t=%.3f ns\n", *tr.switch_time() * 1e9);
    else
        std::printf("no switching within the horizon\n");
    return 0;
}
