#pragma once

#include <algorithm>
#include <cmath>

#include "macrospin/constants.hpp"
#include "macrospin/vec.hpp"

namespace macrospin {

/// Wrap an azimuth into [0, 2*pi). The spherical solvers wrap after every
/// step so phi stays bounded no matter how many precession turns accumulate.
inline double wrap_phi(double phi) {
    double p = std::fmod(phi, two_pi);
    if (p < 0.0) p += two_pi;
    // fmod of a slightly-negative value can round back up to exactly 2*pi
    if (p >= two_pi) p -= two_pi;
    return p;
}

/// Unit magnetization in spherical coordinates.
/// theta in [0, pi] is the polar angle from +z, phi in [0, 2*pi).
struct MagState {
    double theta = 0.0;
    double phi = 0.0;

    Vec3 cartesian() const {
        const double st = std::sin(theta);
        return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
    }

    /// Local polar unit vector (d m / d theta).
    Vec3 theta_hat() const {
        const double ct = std::cos(theta), st = std::sin(theta);
        return {ct * std::cos(phi), ct * std::sin(phi), -st};
    }

    /// Local azimuthal unit vector. Well defined for any theta (depends on
    /// phi only), which keeps every field term finite at the poles.
    Vec3 phi_hat() const { return {-std::sin(phi), std::cos(phi), 0.0}; }
};

/// Build a canonical state from a unit vector. The input is normalized
/// first, so small drift in |m| does not leak into the angles. At the poles
/// phi is conventionally 0.
inline MagState state_from_cartesian(const Vec3& m_raw) {
    const Vec3 m = normalized(m_raw);
    MagState s;
    s.theta = std::acos(std::clamp(m.z, -1.0, 1.0));
    s.phi = (m.x == 0.0 && m.y == 0.0) ? 0.0 : wrap_phi(std::atan2(m.y, m.x));
    return s;
}

/// Reduce raw integration angles (theta may have left [0, pi] mid-step) to
/// the canonical chart: reflect theta at the poles, move phi by pi when a
/// reflection happens, and wrap phi.
inline MagState canonical_state(double theta_raw, double phi_raw) {
    double th = std::fmod(theta_raw, two_pi);
    if (th < 0.0) th += two_pi;
    double ph = phi_raw;
    if (th > pi) {
        th = two_pi - th;
        ph += pi;
    }
    return {th, wrap_phi(ph)};
}

} // namespace macrospin
