#pragma once

#include <cmath>
#include <stdexcept>

#include "macrospin/constants.hpp"
#include "macrospin/device.hpp"
#include "macrospin/state.hpp"
#include "macrospin/vec.hpp"

namespace macrospin {

/// Thermal treatment of a simulation run. Windowing is not a field and is
/// configured separately (WindowConfig in dynamics.hpp).
enum class ThermalMode { off, stochastic, fictitious };

struct ThermalConfig {
    ThermalMode mode = ThermalMode::off;
    double c_f = 0.0;      ///< fictitious-field coefficient (dimensionless)
    double dt_ref = 1e-12; ///< reference step for the fictitious-field scale [s]
    /// Drop mu0 from the radicand (the literal textbook form, dimensionally
    /// inconsistent in SI). Default keeps mu0 so the sampled field carries A/m.
    bool literal_scale = false;
};

/// Standard deviation of each Cartesian component of the thermal field for a
/// step of length dt:  sigma = sqrt(2 k_B T alpha / (gamma' mu0 Ms V dt)).
inline double thermal_field_scale(const DeviceParams& d, const DerivedQuantities& q,
                                  double dt, const PhysicalConstants& c = {},
                                  bool literal_scale = false) {
    if (!(dt > 0.0)) throw std::invalid_argument("thermal_field_scale: dt must be > 0");
    if (d.temperature <= 0.0) return 0.0;
    const double num = 2.0 * c.k_b * d.temperature * d.alpha;
    double den = q.gamma_prime * d.ms * q.volume * dt;
    if (!literal_scale) den *= c.mu0;
    return std::sqrt(num / den);
}

/// Interfacial PMA field: (0, 0, 2 Ki/(t_fl mu0 Ms) m_z).
inline Vec3 h_uniaxial(const Vec3& m, const DeviceParams& d, const PhysicalConstants& c = {}) {
    const double coef = 2.0 * d.ki / (d.t_fl * c.mu0 * d.ms);
    return {0.0, 0.0, coef * m.z};
}

/// Shape anisotropy self-field: -Ms (Nx mx, Ny my, Nz mz).
inline Vec3 h_demag(const Vec3& m, const Vec3& n, double ms) {
    return {-ms * n.x * m.x, -ms * n.y * m.y, -ms * n.z * m.z};
}

/// VCMA contribution, returned with the sign it carries inside the H_eff sum
/// (it is subtracted there): -(2 xi I R/(t_fl t_ox mu0 Ms)) m_z zhat.
inline Vec3 h_vcma(const Vec3& m, double i_mtj, double r_mtj, const DeviceParams& d,
                   const PhysicalConstants& c = {}) {
    if (!(r_mtj > 0.0)) throw std::invalid_argument("h_vcma: r_mtj must be > 0");
    const double coef = 2.0 * d.xi * i_mtj * r_mtj / (d.t_fl * d.t_ox * c.mu0 * d.ms);
    return {0.0, 0.0, -coef * m.z};
}

/// One stochastic thermal-field sample for a step of length dt, from three
/// standard-normal draws supplied by the caller (the random stream is always
/// an explicit input).
inline Vec3 h_thermal_sample(const Vec3& unit_normals, double dt, const DeviceParams& d,
                             const DerivedQuantities& q, const PhysicalConstants& c = {},
                             bool literal_scale = false) {
    const double s = thermal_field_scale(d, q, dt, c, literal_scale);
    return unit_normals * s;
}

/// Convenience overload drawing the normals from any stream exposing
/// normal3().
template <class Rng>
inline Vec3 h_thermal_sample(Rng& rng, double dt, const DeviceParams& d,
                             const DerivedQuantities& q, const PhysicalConstants& c = {},
                             bool literal_scale = false) {
    const Vec3 n = rng.normal3();
    return h_thermal_sample(n, dt, d, q, c, literal_scale);
}

/// Deterministic thermal surrogate: a fixed-magnitude field along the local
/// azimuthal unit vector, c_f * sigma(dt_ref) * phi_hat. The reference step
/// dt_ref keeps the surrogate independent of the solver's actual step size.
inline Vec3 h_fictitious(const DeviceParams& d, const DerivedQuantities& q, double c_f,
                         double dt_ref, const MagState& s, const PhysicalConstants& c = {},
                         bool literal_scale = false) {
    if (c_f == 0.0) return {0.0, 0.0, 0.0};
    const double mag = c_f * thermal_field_scale(d, q, dt_ref, c, literal_scale);
    return s.phi_hat() * mag;
}

/// Deterministic part of the effective field:
/// H_ext + H_uni + H_demag - H_VCMA (+ H_fth in fictitious mode).
inline Vec3 h_deterministic(const MagState& s, const Vec3& h_ext, double i_mtj, double r_mtj,
                            const DeviceParams& d, const DerivedQuantities& q,
                            const ThermalConfig& th, const PhysicalConstants& c = {}) {
    const Vec3 m = s.cartesian();
    Vec3 h = h_ext + h_uniaxial(m, d, c) + h_demag(m, q.demag, d.ms) +
             h_vcma(m, i_mtj, r_mtj, d, c);
    if (th.mode == ThermalMode::fictitious)
        h += h_fictitious(d, q, th.c_f, th.dt_ref, s, c, th.literal_scale);
    return h;
}

/// Full effective field; in stochastic mode the caller supplies the three
/// normal draws for this step (held fixed across a Heun predictor/corrector
/// pair).
inline Vec3 h_eff(const MagState& s, const Vec3& h_ext, double i_mtj, double r_mtj,
                  const DeviceParams& d, const DerivedQuantities& q, const ThermalConfig& th,
                  const Vec3& unit_normals, double dt, const PhysicalConstants& c = {}) {
    Vec3 h = h_deterministic(s, h_ext, i_mtj, r_mtj, d, q, th, c);
    if (th.mode == ThermalMode::stochastic)
        h += h_thermal_sample(unit_normals, dt, d, q, c, th.literal_scale);
    return h;
}

} // namespace macrospin
