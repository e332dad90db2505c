#ifndef OTALG_DYNAMICS_HPP
#define OTALG_DYNAMICS_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "otalg/errors.hpp"
#include "otalg/vec3.hpp"

namespace otalg {

/// Point-mass lander state in the ENU frame with origin at the landing site.
struct LanderState {
    Vec3 r;        // position [m]
    Vec3 v;        // velocity [m/s]
    double m = 0;  // mass [kg]
    double t = 0;  // time [s]
};

/// Environment and propulsion constants. Defaults are the Martian trench
/// scenario: g = -3.7114 m/s^2, Isp = 225 s, ten thrusters of 3100 N each.
struct EnvParams {
    Vec3 g{0.0, 0.0, -3.7114}; // local gravity [m/s^2]
    double g_e = 9.807;        // Earth gravitational acceleration [m/s^2]
    double isp = 225.0;        // specific impulse [s]
    double t_max = 31000.0;    // total thrust bound [N]
    bool perturbation_enabled = false;
    // the sinusoidal perturbation normally scales the applied (saturated)
    // command; set this to scale the raw command instead
    bool perturb_raw_command = false;

    void validate() const {
        if (!(g_e > 0.0) || !(isp > 0.0) || !(t_max > 0.0))
            throw ValidationError("env: g_e, isp, t_max must be positive");
        if (!(g.z < 0.0))
            throw ValidationError("env: gravity must point down (g_z < 0)");
    }
};

/// Bounded sinusoidal perturbation a_p = 0.5 * a_ref * sin(pi * t / 3),
/// a componentwise scaling of the reference acceleration.
inline Vec3 perturbation(const Vec3& a_ref, double t) {
    return a_ref * (0.5 * std::sin(M_PI * t / 3.0));
}

/// One logged control step: state at the step start plus the command applied
/// across it and the barrier distances seen by the guidance law.
struct TrajectorySample {
    double t = 0.0;
    Vec3 r;
    Vec3 v;
    double m = 0.0;
    Vec3 a_cmd;
    Vec3 a_applied;
    double thrust = 0.0; // ||T|| = m * ||a_applied|| at the sample [N]
    Vec3 d;              // signed barrier distances [m]
    bool saturated = false;
};

using TrajectoryLog = std::vector<TrajectorySample>;

/// Advances the state by one classical RK4 step of size dt under a commanded
/// acceleration held constant across the step (zero-order hold).
///
/// Dynamics: r' = v, v' = a_applied + g + a_p, m' = -m*||a_applied||/(Isp*g_e)
/// with the thrust magnitude following the instantaneous stage mass. The
/// perturbation, when enabled, scales `pert_ref` (defaults to a_applied) by
/// 0.5*sin(pi t/3) and is re-evaluated at the RK4 stage times.
inline LanderState step(const LanderState& state, const Vec3& a_applied, const EnvParams& env,
                        double dt, std::optional<Vec3> pert_ref = std::nullopt) {
    if (!(dt > 0.0))
        throw ValidationError("step: dt must be positive");
    if (!(state.m > 0.0))
        throw PropellantDepletedError("step: mass must be positive");

    const double a_mag = norm(a_applied);
    const double mdot_coeff = -a_mag / (env.isp * env.g_e);
    const Vec3 pert_base = env.perturbation_enabled ? pert_ref.value_or(a_applied) : Vec3{};

    struct Deriv {
        Vec3 dr, dv;
        double dm;
    };
    auto deriv = [&](const Vec3& /*r*/, const Vec3& v, double m, double t) -> Deriv {
        Vec3 acc = a_applied + env.g;
        if (env.perturbation_enabled)
            acc += perturbation(pert_base, t);
        return {v, acc, mdot_coeff * m};
    };

    const double h = dt;
    const Deriv k1 = deriv(state.r, state.v, state.m, state.t);
    const Deriv k2 = deriv(state.r + k1.dr * (h / 2), state.v + k1.dv * (h / 2),
                           state.m + k1.dm * (h / 2), state.t + h / 2);
    const Deriv k3 = deriv(state.r + k2.dr * (h / 2), state.v + k2.dv * (h / 2),
                           state.m + k2.dm * (h / 2), state.t + h / 2);
    const Deriv k4 = deriv(state.r + k3.dr * h, state.v + k3.dv * h, state.m + k3.dm * h,
                           state.t + h);

    LanderState next;
    next.r = state.r + (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr) * (h / 6.0);
    next.v = state.v + (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) * (h / 6.0);
    next.m = state.m + (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm) * (h / 6.0);
    next.t = state.t + h;
    if (!(next.m > 0.0))
        throw PropellantDepletedError("step: propellant depleted");
    return next;
}

/// Net propellant consumed over a trajectory.
inline double fuel_used(const TrajectoryLog& trajectory) {
    if (trajectory.empty())
        throw ValidationError("fuel_used: empty trajectory");
    return trajectory.front().m - trajectory.back().m;
}

} // namespace otalg

#endif
