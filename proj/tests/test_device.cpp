#include <catch2/catch_amalgamated.hpp>

#include "macrospin/macrospin.hpp"
#include "test_helpers.hpp"

using namespace macrospin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Vec3 algebra") {
    const Vec3 a{1.0, 2.0, 3.0};
    const Vec3 b{-2.0, 0.5, 4.0};
    REQUIRE(dot(a, b) == -2.0 + 1.0 + 12.0);
    const Vec3 c = cross(a, b);
    REQUIRE_THAT(c.x, WithinAbs(2.0 * 4.0 - 3.0 * 0.5, 1e-15));
    REQUIRE_THAT(c.y, WithinAbs(3.0 * -2.0 - 1.0 * 4.0, 1e-15));
    REQUIRE_THAT(c.z, WithinAbs(1.0 * 0.5 - 2.0 * -2.0, 1e-15));
    // Anticommutativity and orthogonality of the cross product.
    const Vec3 d = cross(b, a);
    REQUIRE_THAT(c.x + d.x, WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(dot(a, c), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(dot(b, c), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(norm(normalized(a)), WithinRel(1.0, 1e-15));
    REQUIRE(finite(a));
    REQUIRE_FALSE(finite(Vec3{1.0, std::nan(""), 0.0}));
}

TEST_CASE("spherical/cartesian state round trip") {
    for (double theta : {0.05, 0.4, 1.2, pi / 2, 2.3, 3.0}) {
        for (double phi : {-8.0, -1.0, 0.0, 0.7, 3.9, 12.5}) {
            const MagState s = canonical_state(theta, phi);
            const Vec3 m = s.cartesian();
            REQUIRE_THAT(norm(m), WithinRel(1.0, 1e-12));
            const MagState back = state_from_cartesian(m);
            REQUIRE_THAT(back.theta, WithinAbs(s.theta, 1e-12));
            const double dphi = std::remainder(back.phi - s.phi, two_pi);
            REQUIRE_THAT(dphi, WithinAbs(0.0, 1e-9));
        }
    }
    // Extended-chart canonicalization: theta outside [0, pi] maps back in.
    const MagState over = canonical_state(pi + 0.3, 0.0);
    REQUIRE_THAT(over.theta, WithinAbs(pi - 0.3, 1e-12));
    const MagState neg = canonical_state(-0.2, 1.0);
    REQUIRE_THAT(neg.theta, WithinAbs(0.2, 1e-12));
    // Orthonormal local frame.
    const MagState s = canonical_state(0.8, 2.1);
    REQUIRE_THAT(dot(s.cartesian(), s.theta_hat()), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(dot(s.cartesian(), s.phi_hat()), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(dot(s.theta_hat(), s.phi_hat()), WithinAbs(0.0, 1e-14));
}

TEST_CASE("cylinder demag factor anchors") {
    // [DERIVED] Frozen values of the magnetometric N_z integral, computed by
    // an independent 60-digit evaluation (mpmath) cross-checked two ways:
    // direct oscillatory quadrature of the Fourier-Bessel form, and the
    // elliptic-integral reduction evaluated with arbitrary-precision K, E.
    REQUIRE_THAT(cylinder_demag_nz(1.0), WithinAbs(0.31157739267962331, 1e-9));
    REQUIRE_THAT(cylinder_demag_nz(0.5), WithinAbs(0.47448997574807252, 1e-9));
    REQUIRE_THAT(cylinder_demag_nz(10.0), WithinAbs(0.041192875796277065, 1e-9));
    REQUIRE_THAT(cylinder_demag_nz(0.02), WithinAbs(0.93890239378608917, 1e-9));

    // Tensor closes to trace 1 with equal in-plane components.
    const Vec3 n = cylinder_demag_tensor(0.02);
    REQUIRE_THAT(n.x + n.y + n.z, WithinRel(1.0, 1e-12));
    REQUIRE(n.x == n.y);

    // Thin-film closed form agrees with the integral where it is valid.
    REQUIRE_THAT(cylinder_demag_nz_thin_film(0.02),
                 WithinRel(cylinder_demag_nz(0.02), 7e-3));

    REQUIRE_THROWS_AS(cylinder_demag_nz(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(cylinder_demag_nz(-1.0), std::invalid_argument);
}

TEST_CASE("derived quantities for the reference device") {
    DeviceParams d = testutil::reference_device();
    const DerivedQuantities q = derive(d);

    // [DERIVED] Frozen oracle values for this parameter set (independent
    // 60-digit evaluation of the defining formulas).
    REQUIRE_THAT(q.volume, WithinRel(1.9634954084936208e-24, 1e-12));
    REQUIRE_THAT(q.gamma_prime, WithinRel(2.2114600833228677e5, 1e-12));
    REQUIRE_THAT(q.demag.z, WithinAbs(0.93890239378608917, 1e-9));
    REQUIRE_THAT(q.demag.x, WithinAbs(0.030548803106955414, 1e-9));
    REQUIRE_THAT(q.h_k_eff, WithinRel(2.362668828954999e5, 1e-9));
    REQUIRE_THAT(q.delta, WithinRel(84.447990348252823, 1e-9));
    REQUIRE_THAT(q.theta0, WithinRel(0.10881915282980397, 1e-9));
    REQUIRE_THAT(q.theta0, WithinRel(std::sqrt(1.0 / q.delta), 1e-15));
}

TEST_CASE("derive honors explicit geometry overrides") {
    DeviceParams d = testutil::reference_device();
    d.volume = 2.0e-24;
    d.demag = {0.05, 0.05, 0.9};
    const DerivedQuantities q = derive(d);
    REQUIRE(q.volume == 2.0e-24);
    REQUIRE(q.demag.z == 0.9);
    // h_k_eff follows the explicit tensor.
    const double h_uni = 2.0 * d.ki / (d.t_fl * PhysicalConstants{}.mu0 * d.ms);
    REQUIRE_THAT(q.h_k_eff, WithinRel(h_uni - d.ms * (0.9 - 0.05), 1e-12));
}

TEST_CASE("zero temperature limit") {
    DeviceParams d = testutil::reference_device();
    d.temperature = 0.0;
    const DerivedQuantities q = derive(d);
    REQUIRE(std::isinf(q.delta));
    REQUIRE(q.theta0 == 0.0);
}

TEST_CASE("device validation rejects bad parameters") {
    auto reject = [](auto mutate) {
        DeviceParams d = testutil::reference_device();
        mutate(d);
        REQUIRE_THROWS_AS(validate(d), std::invalid_argument);
    };
    reject([](DeviceParams& d) { d.ms = 0.0; });
    reject([](DeviceParams& d) { d.alpha = 0.0; });
    reject([](DeviceParams& d) { d.alpha = 1.5; });
    reject([](DeviceParams& d) { d.p_spin = 1.0; });
    reject([](DeviceParams& d) { d.lambda_stt = 0.5; });
    reject([](DeviceParams& d) { d.t_fl = 0.0; });
    reject([](DeviceParams& d) { d.t_ox = 0.0; });
    reject([](DeviceParams& d) { d.temperature = -1.0; });
    reject([](DeviceParams& d) { d.r_ap = d.r_p; });
    reject([](DeviceParams& d) { d.m_p = {0.0, 0.0, 0.0}; });
    reject([](DeviceParams& d) { d.demag = {0.3, 0.3, 0.5}; }); // sums to 1.1

    // In-plane dominated stack is not a PMA device: derive must refuse.
    DeviceParams d = testutil::reference_device();
    d.ki = 1e-5;
    REQUIRE_THROWS_AS(derive(d), std::invalid_argument);

    // validate normalizes m_p.
    DeviceParams n = testutil::reference_device();
    n.m_p = {0.0, 0.0, 4.0};
    validate(n);
    REQUIRE_THAT(norm(n.m_p), WithinRel(1.0, 1e-15));
}
