#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "macrospin/macrospin.hpp"
#include "test_helpers.hpp"

using namespace macrospin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Scenario stochastic_scenario(double t_end) {
    Scenario sc = testutil::reference_scenario();
    sc.solver.scheme = Scheme::stochastic_heun;
    sc.solver.dt = 1e-12;
    sc.solver.t_end = t_end;
    sc.thermal.mode = ThermalMode::stochastic;
    return sc;
}

bool same_bits(double a, double b) {
    std::uint64_t ua, ub;
    std::memcpy(&ua, &a, 8);
    std::memcpy(&ub, &b, 8);
    return ua == ub;
}

} // namespace

TEST_CASE("Wilson interval frozen values") {
    // [DERIVED] Independent evaluation of the score interval at z for 95%.
    const auto [lo, hi] = wilson_interval(37, 1000);
    REQUIRE_THAT(lo, WithinAbs(0.026961180875554734, 1e-12));
    REQUIRE_THAT(hi, WithinAbs(0.05058239748206931, 1e-12));

    const auto [lo0, hi0] = wilson_interval(0, 1000);
    REQUIRE(lo0 == 0.0);
    REQUIRE_THAT(hi0, WithinAbs(0.0038267584855551234, 1e-12));

    // Symmetry: k and n-k mirror around 1/2.
    const auto [la, ha] = wilson_interval(250, 1000);
    const auto [lb, hb] = wilson_interval(750, 1000);
    REQUIRE_THAT(la + hb, WithinRel(1.0, 1e-12));
    REQUIRE_THAT(ha + lb, WithinRel(1.0, 1e-12));

    // Degenerate input.
    const auto [ld, hd] = wilson_interval(0, 0);
    REQUIRE(ld == 0.0);
    REQUIRE(hd == 1.0);

    // The interval always contains the point estimate.
    for (int k : {0, 1, 17, 999, 1000}) {
        const auto [l, h] = wilson_interval(k, 1000);
        const double p = k / 1000.0;
        REQUIRE(l <= p);
        REQUIRE(h >= p);
    }
}

TEST_CASE("nearest-rank percentile") {
    const std::vector<double> v{10.0, 20.0, 30.0, 40.0, 50.0};
    REQUIRE(percentile_nearest_rank(v, 0.01) == 10.0);
    REQUIRE(percentile_nearest_rank(v, 0.20) == 10.0);  // ceil(1.0) = 1
    REQUIRE(percentile_nearest_rank(v, 0.21) == 20.0);
    REQUIRE(percentile_nearest_rank(v, 0.50) == 30.0);
    REQUIRE(percentile_nearest_rank(v, 0.95) == 50.0);
    REQUIRE(percentile_nearest_rank(v, 0.99) == 50.0);
    REQUIRE(percentile_nearest_rank({42.0}, 0.5) == 42.0);
    REQUIRE(std::isnan(percentile_nearest_rank({}, 0.5)));
}

TEST_CASE("outcome aggregation") {
    std::vector<RunOutcome> outcomes(10);
    for (int i = 0; i < 10; ++i) {
        outcomes[i].run_index = i;
        outcomes[i].switched = i < 8; // runs 8, 9 fail
        outcomes[i].switch_time = i < 8 ? (1.0 + i) * 1e-9 : std::nan("");
        outcomes[i].theta_sq_time_avg = (i == 9) ? std::nan("") : 0.01;
    }
    const EnsembleStats st = aggregate_outcomes(outcomes);
    REQUIRE(st.n_total == 10);
    REQUIRE(st.n_switched == 8);
    REQUIRE_THAT(st.wer, WithinRel(0.2, 1e-15));
    const auto [lo, hi] = wilson_interval(2, 10);
    REQUIRE(st.wer_lo == lo);
    REQUIRE(st.wer_hi == hi);
    // Times 1..8 ns: median by nearest rank is the 4th value.
    REQUIRE_THAT(st.switch_times.p50, WithinRel(4e-9, 1e-15));
    REQUIRE_THAT(st.switch_times.p99, WithinRel(8e-9, 1e-15));
    // NaN theta^2 entries are excluded from the mean.
    REQUIRE_THAT(st.theta_sq_mean, WithinRel(0.01, 1e-15));
}

TEST_CASE("ensemble statistics are invariant under the worker count") {
    const Scenario sc = stochastic_scenario(5e-9);
    EnsembleConfig cfg;
    cfg.n_runs = 16;
    cfg.master_seed = 99;

    cfg.workers = 1;
    const EnsembleResult serial = run_ensemble(sc, cfg);
    cfg.workers = 4;
    const EnsembleResult quad = run_ensemble(sc, cfg);

    REQUIRE(serial.outcomes.size() == quad.outcomes.size());
    for (std::size_t i = 0; i < serial.outcomes.size(); ++i) {
        const RunOutcome& a = serial.outcomes[i];
        const RunOutcome& b = quad.outcomes[i];
        REQUIRE(a.run_index == b.run_index);
        REQUIRE(a.switched == b.switched);
        REQUIRE(same_bits(a.switch_time, b.switch_time));
        REQUIRE(same_bits(a.theta_sq_time_avg, b.theta_sq_time_avg));
        REQUIRE(same_bits(a.final_mz, b.final_mz));
    }
    REQUIRE(same_bits(serial.stats.wer, quad.stats.wer));
    REQUIRE(same_bits(serial.stats.theta_sq_mean, quad.stats.theta_sq_mean));
    REQUIRE(same_bits(serial.stats.switch_times.p50, quad.stats.switch_times.p50));
}

TEST_CASE("ensembles are reproducible by master seed") {
    const Scenario sc = stochastic_scenario(3e-9);
    EnsembleConfig cfg;
    cfg.n_runs = 8;
    cfg.master_seed = 123;
    const EnsembleResult a = run_ensemble(sc, cfg);
    const EnsembleResult b = run_ensemble(sc, cfg);
    for (std::size_t i = 0; i < a.outcomes.size(); ++i)
        REQUIRE(same_bits(a.outcomes[i].final_mz, b.outcomes[i].final_mz));

    // A different seed decorrelates the ensemble.
    cfg.master_seed = 124;
    const EnsembleResult c = run_ensemble(sc, cfg);
    bool any_differs = false;
    for (std::size_t i = 0; i < a.outcomes.size(); ++i)
        if (!same_bits(a.outcomes[i].final_mz, c.outcomes[i].final_mz)) any_differs = true;
    REQUIRE(any_differs);

    REQUIRE_THROWS_AS(run_ensemble(sc, EnsembleConfig{0, 1, 0}), std::invalid_argument);
}

TEST_CASE("WER curve sweeps the drive and flags non-monotonic fits") {
    EnsembleConfig cfg;
    cfg.n_runs = 8;
    cfg.master_seed = 5;
    cfg.workers = 1;

    // Descending current grid: the second point cannot switch (zero drive),
    // so its WER is significantly above the first -> warning.
    std::vector<std::string> warnings;
    auto make = [](double current) {
        Scenario sc = stochastic_scenario(10e-9);
        sc.drive.current = Waveform::constant(current);
        return sc;
    };
    const auto pts = wer_curve(cfg, {100e-6, 0.0}, make, &warnings);
    REQUIRE(pts.size() == 2);
    REQUIRE(pts[0].value == 100e-6);
    REQUIRE(pts[0].stats.wer < 0.5);
    REQUIRE(pts[1].stats.wer > 0.5);
    REQUIRE_FALSE(warnings.empty());

    REQUIRE_THROWS_AS(wer_curve(cfg, {}, make), std::invalid_argument);
}
