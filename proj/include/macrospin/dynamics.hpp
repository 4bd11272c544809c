#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "macrospin/constants.hpp"
#include "macrospin/device.hpp"
#include "macrospin/state.hpp"
#include "macrospin/vec.hpp"

namespace macrospin {

// ---------------------------------------------------------------------------
// Spin-transfer torque coefficients
// ---------------------------------------------------------------------------

struct TorqueTerms {
    double beta = 0.0;      ///< STT magnitude (hbar/(mu0 e)) I/(V Ms) [A/m]
    double epsilon = 0.0;   ///< primary torque efficiency
    double eps_prime = 0.0; ///< secondary (field-like) efficiency
};

/// beta and epsilon at the given current and orientation. Positive current
/// writes AP (the sign convention is applied in the RHS, not here).
inline TorqueTerms stt_coefficients(double i_mtj, const Vec3& m, const DeviceParams& d,
                                    const DerivedQuantities& q, const PhysicalConstants& c = {}) {
    TorqueTerms t;
    t.beta = (c.hbar / (c.mu0 * c.e)) * i_mtj / (q.volume * d.ms);
    const double l2 = d.lambda_stt * d.lambda_stt;
    const double mdotp = dot(m, d.m_p);
    const double den = (l2 + 1.0) + (l2 - 1.0) * mdotp;
    if (den <= 1e-12)
        throw std::domain_error("stt_coefficients: degenerate denominator, lambda=" +
                                std::to_string(d.lambda_stt) + " m.m_p=" + std::to_string(mdotp));
    t.epsilon = d.p_spin * l2 / den;
    t.eps_prime = d.eps_prime;
    return t;
}

// ---------------------------------------------------------------------------
// Tukey-window dtheta/dt saturation
// ---------------------------------------------------------------------------

struct WindowConfig {
    bool enabled = false;
    double c_w = 1.0;           ///< window coefficient; theta0_prime = c_w * theta0
    double theta0_prime = 0.0;  ///< resolved floor angle [rad]
};

inline void validate(const WindowConfig& w) {
    if (w.enabled && !(w.theta0_prime > 0.0 && w.theta0_prime < pi / 2.0))
        throw std::invalid_argument("window.theta0_prime must be in (0, pi/2) when enabled");
}

/// Cosine-tapered weight: 0 on [0, theta0'], a half-cosine ramp on
/// [theta0', 1.25 theta0'], 1 up to pi/2, mirrored onto [pi/2, pi].
inline double tukey_weight(double theta, double theta0_prime) {
    const double x = theta <= pi / 2.0 ? theta : pi - theta;
    if (x < theta0_prime) return 0.0;
    if (x - theta0_prime < theta0_prime / 4.0)
        return 0.5 - 0.5 * std::cos(4.0 * pi * (x - theta0_prime) / theta0_prime);
    return 1.0;
}

// ---------------------------------------------------------------------------
// LLGS right-hand side
// ---------------------------------------------------------------------------
//
// The Gilbert form with both STT terms,
//
//   dm/dt = -g0 m x H + alpha m x dm/dt - g0 b [eps A - eps' B],
//   A = m x (m_p x m) = m_p - (m.m_p) m,   B = m x m_p,   g0 = gamma mu0,
//
// solved explicitly for dm/dt via (1+alpha^2)^-1 (1 + alpha m x) gives
//
//   dm/dt = -gt m x H - alpha gt m x (m x H)
//           + gt b [ -(eps + alpha eps') A + (eps' - alpha eps) B ],
//
// with gt = gamma mu0 / (1+alpha^2) applied exactly once. The STT sign is
// chosen so positive current destabilizes the parallel state (writes AP).

/// Cartesian RHS, dm/dt in 1/s. Tangent to the sphere by construction.
inline Vec3 llgs_rhs_cartesian(const Vec3& m, const Vec3& h_eff, const TorqueTerms& t,
                               const DeviceParams& d, const DerivedQuantities& q) {
    const double gt = q.gamma_prime;
    const Vec3 mxh = cross(m, h_eff);
    const Vec3 mxmxh = cross(m, mxh);
    const Vec3 a = d.m_p - m * dot(m, d.m_p);
    const Vec3 b = cross(m, d.m_p);
    const double ca = -(t.epsilon + d.alpha * t.eps_prime);
    const double cb = t.eps_prime - d.alpha * t.epsilon;
    return mxh * -gt + mxmxh * (-d.alpha * gt) + (a * ca + b * cb) * (gt * t.beta);
}

inline Vec3 llgs_rhs_cartesian(const MagState& s, const Vec3& h_eff, const TorqueTerms& t,
                               const DeviceParams& d, const DerivedQuantities& q) {
    return llgs_rhs_cartesian(s.cartesian(), h_eff, t, d, q);
}

struct SphericalRates {
    double dtheta = 0.0; ///< rad/s
    double dphi = 0.0;   ///< rad/s
};

/// Polar-angle floor for the 1/sin(theta) factor in dphi/dt. Only the phi
/// equation is guarded; dtheta/dt is never modified.
inline constexpr double pole_guard_theta = 1e-8;

/// Spherical RHS: dtheta/dt = RHS.theta_hat, dphi/dt = RHS.phi_hat / sin(theta)
/// with the sine floored (sign-preserving) at sin(pole_guard_theta).
///
/// The state may live in the extended chart (theta outside [0, pi]) used by
/// the adaptive solver; the trigonometric forms stay consistent there.
///
/// When the window is enabled, the weight multiplies dtheta/dt only when the
/// motion is pole-ward (|m_z| increasing). Damping collapse is what the
/// window exists to stop; gating the outward direction as well would make
/// theta0' an absorbing fixed point and no later write pulse could ever leave
/// it. See the repository notes on the window semantics.
inline SphericalRates llgs_rhs_spherical(const MagState& s, const Vec3& h_eff,
                                         const TorqueTerms& t, const DeviceParams& d,
                                         const DerivedQuantities& q,
                                         const WindowConfig& w = {}) {
    const double st = std::sin(s.theta);
    const double ct = std::cos(s.theta);
    const double sp = std::sin(s.phi);
    const double cp = std::cos(s.phi);
    const Vec3 that{ct * cp, ct * sp, -st};
    const Vec3 phat{-sp, cp, 0.0};

    const double h_t = dot(h_eff, that);
    const double h_p = dot(h_eff, phat);
    const double a_t = dot(d.m_p, that); // tangential components of A = m_p - (m.m_p) m
    const double a_p = dot(d.m_p, phat);

    const double gt = q.gamma_prime;
    const double ca = -(t.epsilon + d.alpha * t.eps_prime);
    const double cb = t.eps_prime - d.alpha * t.epsilon;

    SphericalRates r;
    // B = m x m_p has components (B.that, B.phat) = (-a_p, a_t).
    r.dtheta = gt * (h_p + d.alpha * h_t) + gt * t.beta * (ca * a_t - cb * a_p);
    double s_guard = st;
    const double s_min = std::sin(pole_guard_theta);
    if (std::abs(s_guard) < s_min) s_guard = s_guard < 0.0 ? -s_min : s_min;
    r.dphi = (gt * (d.alpha * h_p - h_t) + gt * t.beta * (ca * a_p + cb * a_t)) / s_guard;

    if (w.enabled) {
        // Pole-ward means theta moving toward 0 in the upper hemisphere or
        // toward pi in the lower one (in the extended chart: |cos| growing).
        const bool poleward = (ct >= 0.0 && st >= 0.0) ? r.dtheta < 0.0
                            : (ct < 0.0 && st >= 0.0)  ? r.dtheta > 0.0
                            : (ct >= 0.0)              ? r.dtheta > 0.0
                                                       : r.dtheta < 0.0;
        if (poleward) {
            const double theta_c = std::acos(std::clamp(ct, -1.0, 1.0));
            r.dtheta *= tukey_weight(theta_c, w.theta0_prime);
        }
    }
    return r;
}

} // namespace macrospin
