#ifndef OTALG_SIMULATION_HPP
#define OTALG_SIMULATION_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "otalg/dynamics.hpp"
#include "otalg/errors.hpp"
#include "otalg/guidance.hpp"
#include "otalg/stats.hpp"
#include "otalg/terrain.hpp"
#include "otalg/vec3.hpp"

namespace otalg {

enum class GuidanceLaw { Classical, Otalg };

inline const char* to_string(GuidanceLaw law) {
    return law == GuidanceLaw::Classical ? "classical" : "otalg";
}

/// Everything one closed-loop episode needs. Value type: copies are cheap
/// and each Monte-Carlo worker can own one with a different law.
struct ScenarioConfig {
    TargetSpec target;
    double stop_altitude = 0.05; // [m]
    GuidanceLaw law = GuidanceLaw::Otalg;
    EnvParams env;
    TerrainProfile profile;
    BarrierSet barriers;
    GuidanceGains gains;
    double dt = 0.01;      // [s]
    double t_go_guard = 0; // [s]; <= 0 selects the default 2*dt

    double guard() const { return t_go_guard > 0.0 ? t_go_guard : 2.0 * dt; }

    void validate() const {
        target.validate();
        env.validate();
        profile.validate();
        gains.validate();
        if (!(stop_altitude > 0.0))
            throw ValidationError("scenario: stop_altitude must be positive");
        if (!(dt > 0.0))
            throw ValidationError("scenario: dt must be positive");
    }
};

/// Outcome of one episode.
struct RunStats {
    double fuel_used = 0.0;       // [kg]
    double landing_error = 0.0;   // ||r_end - r_f|| [m]
    double terminal_speed = 0.0;  // ||v_end|| [m/s]
    bool collided = false;
    bool completed = false;
    double max_thrust = 0.0;            // [N]
    double saturation_fraction = 0.0;   // fraction of control steps clamped
    std::size_t run_time_steps = 0;
    double flight_time = 0.0;           // [s]
    double min_clearance = 0.0;         // min over samples of r_z - terrain height [m]
    Vec3 r_end;
    Vec3 v_end;
};

struct EpisodeResult {
    TrajectoryLog log;
    RunStats stats;
};

/// Runs one closed-loop descent: guidance -> saturation -> (perturbation) ->
/// RK4 step, until the lander sinks to the stop altitude or the terminal
/// time elapses. Guidance commands are recomputed every step and held once
/// t_go drops below the guard. A step that crosses the stop altitude is cut
/// at the crossing (linear interpolation within the step) so logged samples
/// never dip below the landing plane. Collision with the terrain ends the
/// episode immediately with the impact state recorded.
///
/// Propellant depletion and non-finite states abort the run
/// (completed = false) instead of throwing.
inline EpisodeResult run_episode(const ScenarioConfig& scenario, const LanderState& initial) {
    scenario.validate();
    if (!(initial.m > 0.0) || initial.r.z < 0.0)
        throw ValidationError("run_episode: initial state must have positive mass and altitude");
    if (check_collision(scenario.profile, initial.r))
        throw ValidationError("run_episode: initial state is inside the terrain");

    EpisodeResult out;
    RunStats& stats = out.stats;
    const double guard = scenario.guard();
    const double t_f = scenario.target.t_f;
    const std::size_t max_steps =
        static_cast<std::size_t>(std::ceil(t_f / scenario.dt)) + 8;

    LanderState state = initial;
    const double m0 = initial.m;
    stats.min_clearance = state.r.z - terrain_height(scenario.profile, state.r.x, state.r.y);

    std::optional<GuidanceCommand> held;
    std::size_t saturated_steps = 0;
    bool aborted = false;

    auto clearance = [&](const Vec3& r) {
        return r.z - terrain_height(scenario.profile, r.x, r.y);
    };

    while (state.r.z > scenario.stop_altitude && state.t < t_f - 1e-9 &&
           stats.run_time_steps < max_steps) {
        const double t_go = t_f - state.t;

        GuidanceCommand cmd;
        if (t_go < guard && held) {
            cmd = *held;
        } else {
            // First command of a pathologically short scenario: evaluate at the
            // guard horizon instead of blowing up 1/t_go^2.
            LanderState eval_state = state;
            if (t_go < guard)
                eval_state.t = t_f - guard;
            if (scenario.law == GuidanceLaw::Otalg) {
                cmd = otalg_command(eval_state, scenario.target, scenario.env.g,
                                    scenario.barriers, scenario.profile, scenario.gains);
            } else {
                const ZemZev zz = zem_zev(eval_state, scenario.target, scenario.env.g);
                cmd.zem = zz.zem;
                cmd.zev = zz.zev;
                cmd.a_cmd = classical_command(zz.zem, zz.zev, t_f - eval_state.t);
            }
            held = cmd;
        }

        const SaturationResult sat = saturate(cmd.a_cmd, state.m, scenario.env.t_max);
        cmd.saturated = sat.saturated;
        if (sat.saturated)
            ++saturated_steps;

        const BarrierEvaluation ev = evaluate_barriers(scenario.barriers, scenario.profile, state.r);

        TrajectorySample sample;
        sample.t = state.t;
        sample.r = state.r;
        sample.v = state.v;
        sample.m = state.m;
        sample.a_cmd = cmd.a_cmd;
        sample.a_applied = sat.a_applied;
        sample.thrust = state.m * norm(sat.a_applied);
        sample.d = ev.d;
        sample.saturated = sat.saturated;
        out.log.push_back(sample);
        stats.max_thrust = std::max(stats.max_thrust, sample.thrust);

        LanderState next;
        try {
            const Vec3 pert_ref = scenario.env.perturb_raw_command ? cmd.a_cmd : sat.a_applied;
            next = step(state, sat.a_applied, scenario.env, scenario.dt, pert_ref);
        } catch (const PropellantDepletedError&) {
            aborted = true;
            break;
        }
        if (!all_finite(next.r) || !all_finite(next.v) || !std::isfinite(next.m)) {
            aborted = true;
            break;
        }
        ++stats.run_time_steps;

        if (next.r.z <= scenario.stop_altitude) {
            // Cut the step at the stop-altitude crossing so the terminal
            // sample sits exactly on the plane.
            double f = 1.0;
            if (state.r.z > next.r.z)
                f = (state.r.z - scenario.stop_altitude) / (state.r.z - next.r.z);
            f = std::clamp(f, 0.0, 1.0);
            LanderState final_state;
            final_state.r = state.r + (next.r - state.r) * f;
            final_state.v = state.v + (next.v - state.v) * f;
            final_state.m = state.m + (next.m - state.m) * f;
            final_state.t = state.t + (next.t - state.t) * f;
            state = final_state;
            stats.min_clearance = std::min(stats.min_clearance, clearance(state.r));
            stats.completed = true;
            break;
        }

        state = next;
        stats.min_clearance = std::min(stats.min_clearance, clearance(state.r));
        if (check_collision(scenario.profile, state.r)) {
            stats.collided = true;
            stats.completed = true;
            break;
        }
    }
    if (!stats.completed && !aborted)
        stats.completed = true; // terminal time reached (or started at the stop altitude)

    // Terminal sample: final state, last command re-priced at the final mass.
    TrajectorySample last;
    if (!out.log.empty()) {
        last = out.log.back();
    }
    last.t = state.t;
    last.r = state.r;
    last.v = state.v;
    last.m = state.m;
    last.thrust = state.m * norm(last.a_applied);
    last.d = evaluate_barriers(scenario.barriers, scenario.profile,
                               {state.r.x, state.r.y, std::max(state.r.z, 0.0)})
                 .d;
    out.log.push_back(last);

    stats.fuel_used = m0 - state.m;
    stats.landing_error = norm(state.r - scenario.target.r_f);
    stats.terminal_speed = norm(state.v);
    stats.flight_time = state.t;
    stats.saturation_fraction =
        stats.run_time_steps == 0
            ? 0.0
            : static_cast<double>(saturated_steps) / static_cast<double>(stats.run_time_steps);
    stats.r_end = state.r;
    stats.v_end = state.v;
    if (aborted)
        stats.completed = false;
    return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo dispersion harness
// ---------------------------------------------------------------------------

struct NormalSpec {
    double mean = 0.0;
    double stddev = 1.0;
};

/// Initial-mass model: equal-weight mixture over `means` (one entry makes it
/// a plain normal), shared standard deviation.
struct MassSpec {
    std::vector<double> means{1900.0, 2100.0};
    double stddev = 100.0;

    double mean() const {
        double s = 0.0;
        for (double m : means)
            s += m;
        return s / static_cast<double>(means.size());
    }
};

/// Dispersion setup for the initial-condition draw.
struct MonteCarloConfig {
    std::size_t runs = 300;
    std::uint64_t seed = 7;
    NormalSpec x0{0.0, 350.0};
    NormalSpec y0{0.0, 350.0};
    NormalSpec z0{2500.0, 500.0};
    NormalSpec vx0{0.0, 10.0};
    NormalSpec vy0{0.0, 10.0};
    NormalSpec vz0{-80.0, 10.0};
    MassSpec m0;

    void validate() const {
        if (runs < 2)
            throw ValidationError("montecarlo: need at least two runs");
        for (const NormalSpec* s : {&x0, &y0, &z0, &vx0, &vy0, &vz0}) {
            if (!(s->stddev > 0.0))
                throw ValidationError("montecarlo: spread parameters must be positive");
        }
        if (m0.means.empty() || !(m0.stddev > 0.0))
            throw ValidationError("montecarlo: invalid mass model");
    }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Per-run random stream derived from (seed, run index). Runs can execute in
/// any order on any number of workers and still reproduce bit-identically.
/// Normal deviates come from an explicit Box-Muller transform so the stream
/// does not depend on the standard library's distribution internals.
class RunRng {
public:
    RunRng(std::uint64_t seed, std::uint64_t run_index)
        : state_(detail::mix64(detail::mix64(seed) ^ (run_index + 0x51F15EEDB1A5ull))) {}

    double uniform() { // in (0, 1]
        next();
        return (static_cast<double>(state_ >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal(double mean, double stddev) {
        const double u1 = uniform();
        const double u2 = uniform();
        return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    void next() {
        // xorshift64*; the constructor's mix64 provides seed whitening
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        state_ *= 0x2545F4914F6CDD1Dull;
        if (state_ == 0)
            state_ = 0x9E3779B97F4A7C15ull;
    }

    std::uint64_t state_;
};

struct DrawResult {
    LanderState state;
    std::size_t redraws = 0;
};

/// Draws one dispersed initial condition. Draws that start inside the
/// terrain or below the vertical-barrier floor are rejected and redrawn
/// within the same stream, with the redraw count reported.
inline DrawResult draw_initial_state(const MonteCarloConfig& mc, const TerrainProfile& profile,
                                     const BarrierSet& barriers, std::uint64_t run_index) {
    RunRng rng(mc.seed, run_index);
    DrawResult out;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        LanderState s;
        s.r.x = rng.normal(mc.x0.mean, mc.x0.stddev);
        s.r.y = rng.normal(mc.y0.mean, mc.y0.stddev);
        s.r.z = rng.normal(mc.z0.mean, mc.z0.stddev);
        s.v.x = rng.normal(mc.vx0.mean, mc.vx0.stddev);
        s.v.y = rng.normal(mc.vy0.mean, mc.vy0.stddev);
        s.v.z = rng.normal(mc.vz0.mean, mc.vz0.stddev);
        double mean = mc.m0.means.front();
        if (mc.m0.means.size() > 1) {
            const double u = rng.uniform();
            const std::size_t k = std::min(
                static_cast<std::size_t>(u * static_cast<double>(mc.m0.means.size())),
                mc.m0.means.size() - 1);
            mean = mc.m0.means[k];
        }
        s.m = rng.normal(mean, mc.m0.stddev);
        s.t = 0.0;

        const bool valid = s.r.z > 0.0 && s.m > 0.0 &&
                           !check_collision(profile, s.r) &&
                           s.r.z >= vertical_barrier(barriers, profile, s.r);
        if (valid) {
            out.state = s;
            return out;
        }
        ++out.redraws;
    }
    throw ValidationError("draw_initial_state: rejection sampling failed to converge");
}

/// Paired dispersion results: both laws driven by the identical IC stream.
struct MonteCarloResult {
    std::vector<LanderState> initial_states;
    std::vector<RunStats> otalg;
    std::vector<RunStats> classical;
    std::size_t redraws = 0;
};

namespace detail {

inline unsigned worker_count(std::size_t jobs) {
    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("OTALG_WORKERS")) {
        const long v = std::atol(env);
        if (v > 0)
            workers = static_cast<unsigned>(v);
    }
    if (workers == 0)
        workers = 1;
    return static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
}

template <typename Fn>
inline void parallel_for(std::size_t jobs, Fn&& fn) {
    const unsigned workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = cursor.fetch_add(1); i < jobs; i = cursor.fetch_add(1))
                fn(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace detail

/// Runs the paired Monte-Carlo batch: N initial conditions drawn from the
/// Table-3-style distributions, each propagated under both guidance laws.
/// Deterministic for a given seed regardless of worker count.
inline MonteCarloResult run_monte_carlo(const ScenarioConfig& scenario,
                                        const MonteCarloConfig& mc) {
    scenario.validate();
    mc.validate();

    MonteCarloResult result;
    result.initial_states.resize(mc.runs);
    result.otalg.resize(mc.runs);
    result.classical.resize(mc.runs);

    for (std::size_t i = 0; i < mc.runs; ++i) {
        DrawResult d = draw_initial_state(mc, scenario.profile, scenario.barriers, i);
        result.initial_states[i] = d.state;
        result.redraws += d.redraws;
    }

    ScenarioConfig scn_otalg = scenario;
    scn_otalg.law = GuidanceLaw::Otalg;
    ScenarioConfig scn_classical = scenario;
    scn_classical.law = GuidanceLaw::Classical;

    detail::parallel_for(mc.runs, [&](std::size_t i) {
        result.otalg[i] = run_episode(scn_otalg, result.initial_states[i]).stats;
        result.classical[i] = run_episode(scn_classical, result.initial_states[i]).stats;
    });
    return result;
}

/// Fuel lists for the paired test. A pair is dropped when either run failed
/// to complete or collided (a collided run burns less fuel only because it
/// ended early).
struct PairedFuel {
    std::vector<double> otalg;
    std::vector<double> classical;
    std::size_t dropped_failed = 0;
    std::size_t dropped_collided = 0;
};

inline PairedFuel paired_fuel(const MonteCarloResult& result) {
    PairedFuel out;
    for (std::size_t i = 0; i < result.otalg.size(); ++i) {
        const RunStats& a = result.otalg[i];
        const RunStats& b = result.classical[i];
        if (!a.completed || !b.completed) {
            ++out.dropped_failed;
            continue;
        }
        if (a.collided || b.collided) {
            ++out.dropped_collided;
            continue;
        }
        out.otalg.push_back(a.fuel_used);
        out.classical.push_back(b.fuel_used);
    }
    return out;
}

/// Box-chart style aggregate over one law's runs.
struct BatchSummary {
    std::size_t n_runs = 0;
    std::size_t completed = 0;
    std::size_t collisions = 0;
    std::size_t aborts = 0;
    double collision_rate = 0.0;
    double mean_saturation_fraction = 0.0;
    double min_clearance = 0.0; // min over completed runs
    FiveNum fuel;
    FiveNum landing_error;
    FiveNum terminal_speed;
};

/// Quantiles are taken over completed runs; collision and abort counts
/// cover the whole batch.
inline BatchSummary summarize(const std::vector<RunStats>& stats) {
    if (stats.empty())
        throw ValidationError("summarize: empty batch");
    BatchSummary s;
    s.n_runs = stats.size();
    std::vector<double> fuel, err, speed;
    double sat_sum = 0.0;
    double min_clear = std::numeric_limits<double>::infinity();
    for (const RunStats& r : stats) {
        if (r.collided)
            ++s.collisions;
        if (!r.completed) {
            ++s.aborts;
            continue;
        }
        ++s.completed;
        fuel.push_back(r.fuel_used);
        err.push_back(r.landing_error);
        speed.push_back(r.terminal_speed);
        sat_sum += r.saturation_fraction;
        min_clear = std::min(min_clear, r.min_clearance);
    }
    s.collision_rate = static_cast<double>(s.collisions) / static_cast<double>(s.n_runs);
    if (s.completed > 0) {
        s.mean_saturation_fraction = sat_sum / static_cast<double>(s.completed);
        s.min_clearance = min_clear;
        s.fuel = five_number_summary(fuel);
        s.landing_error = five_number_summary(err);
        s.terminal_speed = five_number_summary(speed);
    }
    return s;
}

} // namespace otalg

#endif
