#include <catch2/catch_amalgamated.hpp>

#include "macrospin/macrospin.hpp"
#include "test_helpers.hpp"

using namespace macrospin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
DeviceParams dev() { return testutil::reference_device(); }
DerivedQuantities drv(DeviceParams& d) { return derive(d); }
} // namespace

TEST_CASE("uniaxial anisotropy field") {
    DeviceParams d = dev();
    // [DERIVED] 2*Ki/(t_fl*mu0*Ms) for the reference stack.
    const Vec3 h = h_uniaxial({0.0, 0.0, 1.0}, d);
    REQUIRE(h.x == 0.0);
    REQUIRE(h.y == 0.0);
    REQUIRE_THAT(h.z, WithinRel(1.326291191710e6, 1e-12));
    // Linear in m_z, no transverse component.
    const Vec3 h2 = h_uniaxial({0.6, 0.0, 0.5}, d);
    REQUIRE_THAT(h2.z, WithinRel(0.5 * 1.326291191710e6, 1e-12));
    REQUIRE(h2.x == 0.0);
}

TEST_CASE("demagnetizing field") {
    const Vec3 n{0.03, 0.04, 0.93};
    const Vec3 m{0.2, -0.5, 0.8};
    const Vec3 h = h_demag(m, n, 1.2e6);
    REQUIRE_THAT(h.x, WithinRel(-1.2e6 * 0.03 * 0.2, 1e-15));
    REQUIRE_THAT(h.y, WithinRel(-1.2e6 * 0.04 * -0.5, 1e-15));
    REQUIRE_THAT(h.z, WithinRel(-1.2e6 * 0.93 * 0.8, 1e-15));
}

TEST_CASE("VCMA field") {
    DeviceParams d = dev();
    d.xi = 1e-4;
    // [DERIVED] 2*xi*I*R/(t_fl*t_ox*mu0*Ms) at I = 35 uA, R = 2 kohm.
    const Vec3 h = h_vcma({0.0, 0.0, 1.0}, 35e-6, 2000.0, d);
    REQUIRE_THAT(h.z, WithinRel(-9.284038341973e12, 1e-12));
    REQUIRE(h.x == 0.0);
    // Proportional to m_z; zero coefficient gives zero field.
    REQUIRE_THAT(h_vcma({0.0, 0.0, 0.5}, 35e-6, 2000.0, d).z,
                 WithinRel(-0.5 * 9.284038341973e12, 1e-12));
    d.xi = 0.0;
    REQUIRE(h_vcma({0.0, 0.0, 1.0}, 35e-6, 2000.0, d).z == 0.0);
    REQUIRE_THROWS_AS(h_vcma({0.0, 0.0, 1.0}, 35e-6, 0.0, d), std::invalid_argument);
}

TEST_CASE("thermal field scale") {
    DeviceParams d = dev();
    const DerivedQuantities q = drv(d);

    // [DERIVED] sigma^2 at dt = 1 ps for the reference device:
    // 2 k_B T alpha / (gamma' mu0 Ms V dt).
    const double s1 = thermal_field_scale(d, q, 1e-12);
    REQUIRE_THAT(s1 * s1, WithinRel(1.265127884092e8, 1e-12));

    // sigma ~ 1/sqrt(dt): quadrupling dt halves sigma.
    const double s4 = thermal_field_scale(d, q, 4e-12);
    REQUIRE_THAT(s1 / s4, WithinRel(2.0, 1e-12));

    // Dropping the mu0 factor from the denominator multiplies the radicand
    // by mu0, so the literal variant is smaller by exactly sqrt(mu0).
    const double sl = thermal_field_scale(d, q, 1e-12, {}, true);
    REQUIRE_THAT(sl / s1, WithinRel(std::sqrt(PhysicalConstants{}.mu0), 1e-12));

    // T = 0 is noiseless; nonpositive dt is an error.
    DeviceParams cold = dev();
    cold.temperature = 0.0;
    const DerivedQuantities qc = drv(cold);
    REQUIRE(thermal_field_scale(cold, qc, 1e-12) == 0.0);
    REQUIRE_THROWS_AS(thermal_field_scale(d, q, 0.0), std::invalid_argument);

    // A sample is exactly sigma * unit normals.
    const Vec3 h = h_thermal_sample(Vec3{1.0, -2.0, 0.5}, 1e-12, d, q);
    REQUIRE_THAT(h.x, WithinRel(s1, 1e-15));
    REQUIRE_THAT(h.y, WithinRel(-2.0 * s1, 1e-15));
}

TEST_CASE("fictitious thermal field") {
    DeviceParams d = dev();
    const DerivedQuantities q = drv(d);
    const MagState s{0.7, 1.3};

    const double c_f = 0.02;
    const Vec3 h = h_fictitious(d, q, c_f, 1e-12, s);
    const double sigma_ref = thermal_field_scale(d, q, 1e-12);
    REQUIRE_THAT(norm(h), WithinRel(c_f * sigma_ref, 1e-12));
    // Azimuthal: orthogonal to m and to theta_hat.
    REQUIRE_THAT(dot(h, s.cartesian()), WithinAbs(0.0, 1e-3));
    REQUIRE_THAT(dot(normalized(h), s.phi_hat()), WithinRel(1.0, 1e-12));
    // Zero coefficient short-circuits to zero.
    const Vec3 h0 = h_fictitious(d, q, 0.0, 1e-12, s);
    REQUIRE(norm(h0) == 0.0);
    // Magnitude is set by dt_ref, not by the solver step.
    const Vec3 h2 = h_fictitious(d, q, c_f, 4e-12, s);
    REQUIRE_THAT(norm(h) / norm(h2), WithinRel(2.0, 1e-12));
}

TEST_CASE("effective field superposition") {
    DeviceParams d = dev();
    d.xi = 1e-4;
    const DerivedQuantities q = drv(d);
    const MagState s{0.6, 0.9};
    const Vec3 m = s.cartesian();
    const Vec3 h_ext{1e3, -2e3, 5e2};
    const double i_mtj = 35e-6, r_mtj = 4.1e3;

    ThermalConfig off;
    const Vec3 h = h_deterministic(s, h_ext, i_mtj, r_mtj, d, q, off);
    const Vec3 manual = h_ext + h_uniaxial(m, d) + h_demag(m, q.demag, d.ms) +
                        h_vcma(m, i_mtj, r_mtj, d);
    REQUIRE_THAT(norm(h - manual), WithinAbs(0.0, norm(manual) * 1e-15));

    // Fictitious mode adds exactly the surrogate term.
    ThermalConfig fict;
    fict.mode = ThermalMode::fictitious;
    fict.c_f = 0.05;
    const Vec3 hf = h_deterministic(s, h_ext, i_mtj, r_mtj, d, q, fict);
    const Vec3 add = h_fictitious(d, q, fict.c_f, fict.dt_ref, s);
    REQUIRE_THAT(norm(hf - (h + add)), WithinAbs(0.0, norm(hf) * 1e-15));

    // Stochastic mode adds sigma(dt)-scaled normals through h_eff.
    ThermalConfig sto;
    sto.mode = ThermalMode::stochastic;
    const Vec3 normals{0.3, -1.1, 2.0};
    const Vec3 hs = h_eff(s, h_ext, i_mtj, r_mtj, d, q, sto, normals, 1e-12);
    const Vec3 hexp = h + h_thermal_sample(normals, 1e-12, d, q);
    REQUIRE_THAT(norm(hs - hexp), WithinAbs(0.0, norm(hexp) * 1e-15));
}
