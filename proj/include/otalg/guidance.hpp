#ifndef OTALG_GUIDANCE_HPP
#define OTALG_GUIDANCE_HPP

#include <cmath>

#include "otalg/dynamics.hpp"
#include "otalg/errors.hpp"
#include "otalg/terrain.hpp"
#include "otalg/vec3.hpp"

namespace otalg {

/// Barrier-avoidance weights of the augmented performance index, one triple
/// per axis. l1 keeps phi finite on the barrier, l2 sets the width of the
/// repulsion well, l3 scales the avoidance acceleration.
struct GuidanceGains {
    Vec3 l1{1.0, 1.0, 1.0};
    Vec3 l2{3000.0, 3000.0, 3000.0};
    Vec3 l3{280.0, 280.0, 280.0};

    void validate() const {
        for (int i = 0; i < 3; ++i) {
            if (!(l1[i] > 0.0) || !(l2[i] > 0.0))
                throw ValidationError("gains: l1 and l2 must be strictly positive");
            // l3 = 0 switches the avoidance term off (the law degenerates to
            // the classical command), which is a legitimate configuration.
            if (l3[i] < 0.0)
                throw ValidationError("gains: l3 must be non-negative");
        }
    }
};

/// Desired terminal state of the rendezvous: position, velocity and time.
struct TargetSpec {
    Vec3 r_f{0.0, 0.0, 0.0};
    Vec3 v_f{0.0, 0.0, 0.0};
    double t_f = 100.0; // [s]

    void validate() const {
        if (!(t_f > 0.0))
            throw ValidationError("target: t_f must be positive");
    }
};

struct ZemZev {
    Vec3 zem; // [m]
    Vec3 zev; // [m/s]
};

/// One guidance evaluation: the commanded acceleration, the zero-effort
/// terms it was built from, and the avoidance contribution Gamma.
struct GuidanceCommand {
    Vec3 a_cmd;      // [m/s^2]
    Vec3 zem;        // [m]
    Vec3 zev;        // [m/s]
    Vec3 avoidance;  // Gamma = p * t_go^2 / 12 [m/s^2]
    bool saturated = false;
};

/// Zero-effort miss / zero-effort velocity: the terminal position and
/// velocity errors if thrust were cut now and only gravity acted until t_f.
inline ZemZev zem_zev(const LanderState& state, const TargetSpec& target, const Vec3& g) {
    const double t_go = target.t_f - state.t;
    if (!(t_go > 0.0))
        throw GuidanceHorizonError("zem_zev: t_go must be positive");
    ZemZev out;
    out.zem = target.r_f - (state.r + state.v * t_go + g * (0.5 * t_go * t_go));
    out.zev = target.v_f - (state.v + g * t_go);
    return out;
}

/// Classical fuel-optimal ZEM/ZEV feedback command.
inline Vec3 classical_command(const Vec3& zem, const Vec3& zev, double t_go) {
    if (!(t_go > 0.0))
        throw GuidanceHorizonError("classical_command: t_go must be positive");
    return zem * (6.0 / (t_go * t_go)) - zev * (2.0 / t_go);
}

/// Barrier proximity measure phi = l2 / (d^2 + l1); finite and positive for
/// every d thanks to l1 > 0. Large on the barrier, -> 0 far away.
inline double phi(double d, double l1, double l2) { return l2 / (d * d + l1); }

/// Costate rate p_dot = l2*l3 * d * exp(-phi) / (d^2 + l1)^2, odd in d.
/// Its sign matches sign(d), which is what pushes the lander away from the
/// barrier surface on the side it currently occupies.
inline double p_dot(double d, double l1, double l2, double l3) {
    const double s = d * d + l1;
    return l2 * l3 * d * std::exp(-phi(d, l1, l2)) / (s * s);
}

/// Barrier standoff at which the avoidance acceleration magnitude peaks.
inline double critical_distance(double l1, double l2) {
    const double root = std::sqrt(l2 * l2 - 2.0 * l1 * l2 + 4.0 * l1 * l1);
    return std::sqrt(root + l2 - l1) / std::sqrt(3.0);
}

/// Partial derivative of the avoidance term Gamma_i with respect to r_i.
/// Vanishes exactly at d = critical_distance(l1, l2).
inline double avoidance_gradient(double d, double l1, double l2, double l3, double t_go) {
    const double s = d * d + l1;
    const double kappa = l2 * l3 * t_go * t_go / 12.0;
    const double bracket = 1.0 - 4.0 * d * d / s + 2.0 * l2 * d * d / (s * s);
    return kappa / (s * s) * bracket * std::exp(-phi(d, l1, l2));
}

/// Thrust magnitude the augmented index requires to stay positive:
/// |T| >= m0 * sqrt(l3 * exp(-phi)). The worst case is phi -> 0.
inline double min_thrust_bound(double m0, double l3, double phi_min) {
    if (!(m0 > 0.0))
        throw ValidationError("min_thrust_bound: m0 must be positive");
    return m0 * std::sqrt(l3 * std::exp(-phi_min));
}

struct SaturationResult {
    Vec3 a_applied;
    bool saturated = false;
};

/// Direction-preserving thrust clamp: if ||m * a_cmd|| exceeds t_max the
/// vector is rescaled to exactly t_max / m; the boundary itself passes
/// through unchanged.
inline SaturationResult saturate(const Vec3& a_cmd, double m, double t_max) {
    if (!(m > 0.0))
        throw ValidationError("saturate: mass must be positive");
    const double thrust = m * norm(a_cmd);
    if (thrust <= t_max)
        return {a_cmd, false};
    return {a_cmd * (t_max / thrust), true};
}

/// Terrain-avoidance guidance command: the classical ZEM/ZEV law plus the
/// avoidance term p * t_go^2 / 12, with p evaluated at the instantaneous
/// barrier distances. Reduces exactly to the classical command when l3 = 0.
inline GuidanceCommand otalg_command(const LanderState& state, const TargetSpec& target,
                                     const Vec3& g, const BarrierSet& barriers,
                                     const TerrainProfile& profile, const GuidanceGains& gains,
                                     double min_t_go = 0.0) {
    const double t_go = target.t_f - state.t;
    if (!(t_go > min_t_go))
        throw GuidanceHorizonError("otalg_command: t_go at or below the guard");

    const ZemZev zz = zem_zev(state, target, g);
    const BarrierEvaluation ev = evaluate_barriers(barriers, profile, state.r);

    GuidanceCommand cmd;
    cmd.zem = zz.zem;
    cmd.zev = zz.zev;
    const double w = t_go * t_go / 12.0;
    for (int i = 0; i < 3; ++i)
        cmd.avoidance[i] = p_dot(ev.d[i], gains.l1[i], gains.l2[i], gains.l3[i]) * w;
    cmd.a_cmd = classical_command(zz.zem, zz.zev, t_go) + cmd.avoidance;
    return cmd;
}

} // namespace otalg

#endif
