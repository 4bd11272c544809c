#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "macrospin/constants.hpp"
#include "macrospin/vec.hpp"

namespace macrospin {

// ---------------------------------------------------------------------------
// Cylinder demagnetization factors
// ---------------------------------------------------------------------------

/// Thin-film approximation, accurate to <0.7% for aspect <= 0.02 and <2% up
/// to 0.05. Kept as a cheap cross-check on the exact evaluation below.
inline double cylinder_demag_nz_thin_film(double aspect) {
    if (!(aspect > 0.0)) throw std::invalid_argument("cylinder_demag_nz_thin_film: aspect must be positive");
    return 1.0 - (2.0 * aspect / pi) * (std::log(4.0 / aspect) - 1.0);
}

namespace detail {

/// Complete elliptic integrals K(k) and E(k) given the COMPLEMENTARY modulus
/// k' = sqrt(1 - k^2), via the arithmetic-geometric mean (Abramowitz &
/// Stegun 17.6.3-17.6.4). Parameterizing by k' keeps the evaluation exact
/// as k -> 1, where K diverges logarithmically.
inline void ellip_ke_complement(double kp, double& big_k, double& big_e) {
    double a = 1.0, b = kp;
    double csum = 0.5 * (1.0 - kp * kp); // 2^{-1} c_0^2 with c_0 = k
    double p2 = 0.5;
    for (int it = 0; it < 64 && (a - b) > 1e-17 * a; ++it) {
        const double c = 0.5 * (a - b);
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        p2 *= 2.0;
        csum += p2 * c * c;
    }
    big_k = pi / (2.0 * a);
    big_e = big_k * (1.0 - csum);
}

/// Laplace transform of the end-face charge coupling,
/// G(s) = Int_0^inf J1(q)^2 exp(-s q) dq, in closed elliptic form:
///   G(s) = [ (1 + s^2/2) k K(k) - (2/k) E(k) ] / pi,  k = 2/sqrt(4+s^2)
/// (the coaxial-loop mutual-inductance kernel). Diverges ~ -ln(s) at s = 0.
inline double end_face_coupling(double s) {
    const double root = std::sqrt(4.0 + s * s);
    const double kp = s / root; // complementary modulus, exact for small s
    const double k = 2.0 / root;
    double big_k = 0.0, big_e = 0.0;
    ellip_ke_complement(kp, big_k, big_e);
    return ((1.0 + 0.5 * s * s) * k * big_k - (2.0 / k) * big_e) / pi;
}

} // namespace detail

/// Exact magnetometric (volume-averaged) axial demagnetizing factor of a
/// cylinder with aspect ratio p = thickness / diameter, defined by the
/// Fourier-Bessel form of the end-face charge fields:
///
///   N_z(p) = (1/p) * Int_0^inf  J1(q)^2 (1 - exp(-2 p q)) / q^2  dq
///
/// Evaluated through the exact reduction (two antiderivatives of the
/// Laplace transform G above, using Int J1^2/q^2 = 4/(3 pi) and
/// Int J1^2/q = 1/2):
///
///   N_z(p) = 1 - (1/p) * Int_0^{2p} (2p - s) G(s) ds
///
/// The finite-interval integrand has only a logarithmic endpoint
/// singularity, which tanh-sinh quadrature removes; the result is accurate
/// to ~1e-12 over the full aspect range. Limits: N_z -> 1 as p -> 0 (thin
/// film), N_z -> 4/(3 pi p) as p -> inf. Agrees with the published
/// magnetometric tables (N_z(1) = 0.31158, N_z = 1/3 near p = 0.9065).
inline double cylinder_demag_nz(double aspect) {
    if (!(aspect > 0.0) || !std::isfinite(aspect))
        throw std::invalid_argument("cylinder_demag_nz: aspect ratio must be positive, got " +
                                    std::to_string(aspect));
    const double p = aspect;
    // tanh-sinh nodes s = p (1 + tanh((pi/2) sinh t)), t = j h on [-T, T].
    const int n_side = 64;
    const double t_max = 4.0, h = t_max / n_side;
    double total = 0.0;
    for (int j = -n_side; j <= n_side; ++j) {
        const double t = j * h;
        const double u = 0.5 * pi * std::sinh(t);
        const double s = 2.0 * p / (1.0 + std::exp(-2.0 * u)); // p (1 + tanh u)
        const double rem = 2.0 * p / (1.0 + std::exp(2.0 * u)); // 2p - s, no cancellation
        const double ch = std::cosh(u);
        const double w = 0.5 * pi * std::cosh(t) / (ch * ch);
        total += w * rem * detail::end_face_coupling(s);
    }
    total *= p * h;
    return 1.0 - total / p;
}

/// Full diagonal tensor for a cylinder magnetized along its axis; the two
/// in-plane factors split the remainder equally.
inline Vec3 cylinder_demag_tensor(double aspect) {
    const double nz = cylinder_demag_nz(aspect);
    const double nx = 0.5 * (1.0 - nz);
    return {nx, nx, nz};
}

// ---------------------------------------------------------------------------
// Device parameters
// ---------------------------------------------------------------------------

/// Free-layer and stack parameters, SI units throughout.
struct DeviceParams {
    double ms = 0.0;          ///< saturation magnetization [A/m]
    double alpha = 0.0;       ///< Gilbert damping, (0, 1]
    double gamma = 0.0;       ///< gyromagnetic ratio [rad s^-1 T^-1]
    double p_spin = 0.0;      ///< spin polarization P, (0, 1)
    double lambda_stt = 1.0;  ///< Slonczewski asymmetry, >= 1
    double eps_prime = 0.0;   ///< secondary (field-like) STT coefficient
    double ki = 0.0;          ///< interfacial PMA energy [J/m^2]
    double xi = 0.0;          ///< VCMA coefficient [J V^-1 m^-1]
    double t_fl = 0.0;        ///< free-layer thickness [m]
    double t_ox = 0.0;        ///< tunnel-barrier thickness [m]
    double diameter = 0.0;    ///< free-layer diameter [m]
    double temperature = 0.0; ///< bath temperature [K]
    double r_p = 0.0;         ///< parallel-state resistance [ohm]
    double r_ap = 0.0;        ///< antiparallel-state resistance [ohm]
    Vec3 m_p{0.0, 0.0, 1.0};  ///< pinned-layer unit polarization

    /// Free-layer volume [m^3]; 0 means "derive from cylinder geometry".
    double volume = 0.0;
    /// Demag tensor diagonal; any negative component means "derive from
    /// cylinder geometry". An explicit user value always wins.
    Vec3 demag{-1.0, -1.0, -1.0};

    bool demag_is_explicit() const {
        return demag.x >= 0.0 && demag.y >= 0.0 && demag.z >= 0.0;
    }
};

namespace detail {
inline void check(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}
} // namespace detail

/// Validate the raw parameter set. Throws std::invalid_argument naming the
/// offending field. Normalizes m_p in place.
inline void validate(DeviceParams& d) {
    using detail::check;
    check(std::isfinite(d.ms) && d.ms > 0.0, "device.ms must be > 0 (A/m)");
    check(std::isfinite(d.alpha) && d.alpha > 0.0 && d.alpha <= 1.0, "device.alpha must be in (0, 1]");
    check(std::isfinite(d.gamma) && d.gamma > 0.0, "device.gamma must be > 0 (rad/s/T)");
    check(std::isfinite(d.p_spin) && d.p_spin > 0.0 && d.p_spin < 1.0, "device.p must be in (0, 1)");
    check(std::isfinite(d.lambda_stt) && d.lambda_stt >= 1.0, "device.lambda must be >= 1");
    check(std::isfinite(d.eps_prime) && d.eps_prime >= 0.0 && d.eps_prime < 1.0,
          "device.eps_prime must be in [0, 1)");
    check(std::isfinite(d.ki) && d.ki >= 0.0, "device.ki must be >= 0 (J/m^2)");
    check(std::isfinite(d.xi), "device.xi must be finite (J/V/m)");
    check(std::isfinite(d.t_fl) && d.t_fl > 0.0, "device.t_fl must be > 0 (m)");
    check(std::isfinite(d.t_ox) && d.t_ox > 0.0, "device.t_ox must be > 0 (m)");
    check(std::isfinite(d.diameter) && d.diameter > 0.0, "device.diameter must be > 0 (m)");
    check(std::isfinite(d.temperature) && d.temperature >= 0.0, "device.temperature must be >= 0 (K)");
    check(std::isfinite(d.r_p) && d.r_p > 0.0, "device.r_p must be > 0 (ohm)");
    check(std::isfinite(d.r_ap) && d.r_ap > d.r_p, "device.r_ap must be > r_p");
    check(finite(d.m_p) && norm(d.m_p) > 1e-12, "device.m_p must be a nonzero vector");
    d.m_p = normalized(d.m_p);
    check(std::isfinite(d.volume) && d.volume >= 0.0, "device.volume must be >= 0 (0 = derive)");
    if (d.demag_is_explicit()) {
        const double s = d.demag.x + d.demag.y + d.demag.z;
        check(std::abs(s - 1.0) < 1e-6, "device.demag components must sum to 1");
    }
}

/// Quantities derived once per device and reused by every field/torque
/// evaluation.
struct DerivedQuantities {
    double gamma_prime = 0.0; ///< gamma*mu0/(1+alpha^2) [(A/m)^-1 s^-1]
    double volume = 0.0;      ///< resolved free-layer volume [m^3]
    Vec3 demag;               ///< resolved demag tensor diagonal
    double h_k_eff = 0.0;     ///< net perpendicular anisotropy field [A/m]
    double delta = 0.0;       ///< thermal stability factor (inf at T = 0)
    double theta0 = 0.0;      ///< RMS thermal cone angle sqrt(1/delta) [rad]
};

/// Resolve geometry defaults and compute derived quantities.
///
/// H_k_eff uses the energy-curvature form 2*Ki/(t_fl*mu0*Ms) - Ms*(Nz - Nperp)
/// with Nperp the mean transverse demag factor: tilting away from z both
/// releases axial demag energy and costs transverse demag energy, and the
/// barrier (hence delta and theta0) follows that curvature.
/// Throws std::invalid_argument if the net anisotropy is not perpendicular.
inline DerivedQuantities derive(DeviceParams& d, const PhysicalConstants& c = {}) {
    validate(d);
    DerivedQuantities q;
    q.gamma_prime = d.gamma * c.mu0 / (1.0 + d.alpha * d.alpha);
    q.volume = d.volume > 0.0 ? d.volume
                              : pi * 0.25 * d.diameter * d.diameter * d.t_fl;
    q.demag = d.demag_is_explicit() ? d.demag : cylinder_demag_tensor(d.t_fl / d.diameter);
    const double h_uni = 2.0 * d.ki / (d.t_fl * c.mu0 * d.ms);
    const double n_perp = 0.5 * (q.demag.x + q.demag.y);
    q.h_k_eff = h_uni - d.ms * (q.demag.z - n_perp);
    if (q.h_k_eff <= 0.0)
        throw std::invalid_argument(
            "not a PMA device: net perpendicular anisotropy field is " +
            std::to_string(q.h_k_eff) + " A/m (uniaxial " + std::to_string(h_uni) +
            " minus demag contribution)");
    if (d.temperature > 0.0) {
        q.delta = c.mu0 * d.ms * q.h_k_eff * q.volume / (2.0 * c.k_b * d.temperature);
        q.theta0 = std::sqrt(1.0 / q.delta);
    } else {
        q.delta = std::numeric_limits<double>::infinity();
        q.theta0 = 0.0; // deterministic zero-temperature limit
    }
    return q;
}

} // namespace macrospin
