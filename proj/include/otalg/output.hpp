#ifndef OTALG_OUTPUT_HPP
#define OTALG_OUTPUT_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "otalg/dynamics.hpp"
#include "otalg/simulation.hpp"
#include "otalg/stats.hpp"

namespace otalg {

inline constexpr const char* kTrajectoryCsvHeader =
    "t,rx,ry,rz,vx,vy,vz,m,ax_cmd,ay_cmd,az_cmd,ax_app,ay_app,az_app,"
    "thrust_norm,dx,dy,dz,saturated";

namespace out_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace out_detail

inline void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
    using out_detail::num;
    os << kTrajectoryCsvHeader << '\n';
    for (const TrajectorySample& s : log) {
        os << num(s.t) << ',' << num(s.r.x) << ',' << num(s.r.y) << ',' << num(s.r.z) << ','
           << num(s.v.x) << ',' << num(s.v.y) << ',' << num(s.v.z) << ',' << num(s.m) << ','
           << num(s.a_cmd.x) << ',' << num(s.a_cmd.y) << ',' << num(s.a_cmd.z) << ','
           << num(s.a_applied.x) << ',' << num(s.a_applied.y) << ',' << num(s.a_applied.z)
           << ',' << num(s.thrust) << ',' << num(s.d.x) << ',' << num(s.d.y) << ','
           << num(s.d.z) << ',' << (s.saturated ? 1 : 0) << '\n';
    }
}

inline void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    write_trajectory_csv(f, log);
}

inline json run_stats_json(const RunStats& s) {
    return json{{"fuel_used_kg", s.fuel_used},
                {"landing_error_m", s.landing_error},
                {"terminal_speed_mps", s.terminal_speed},
                {"collided", s.collided},
                {"completed", s.completed},
                {"max_thrust_n", s.max_thrust},
                {"saturation_fraction", s.saturation_fraction},
                {"run_time_steps", s.run_time_steps},
                {"flight_time_s", s.flight_time},
                {"min_clearance_m", s.min_clearance},
                {"r_end", json::array({s.r_end.x, s.r_end.y, s.r_end.z})},
                {"v_end", json::array({s.v_end.x, s.v_end.y, s.v_end.z})}};
}

inline json five_num_json(const FiveNum& f) {
    return json{{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}};
}

inline json batch_summary_json(const BatchSummary& s) {
    return json{{"n_runs", s.n_runs},
                {"completed", s.completed},
                {"collisions", s.collisions},
                {"aborts", s.aborts},
                {"collision_rate", s.collision_rate},
                {"mean_saturation_fraction", s.mean_saturation_fraction},
                {"min_clearance_m", s.min_clearance},
                {"fuel_kg", five_num_json(s.fuel)},
                {"landing_error_m", five_num_json(s.landing_error)},
                {"terminal_speed_mps", five_num_json(s.terminal_speed)}};
}

inline json ttest_json(const TTestResult& t) {
    return json{{"n_pairs", t.n},
                {"alpha", t.alpha},
                {"d_bar_kg", t.d_bar},
                {"se_d_kg", t.se_d},
                {"t", t.t},
                {"df", t.df},
                {"t_crit", t.t_crit},
                {"reject_null", t.reject}};
}

inline constexpr const char* kRunsCsvHeader =
    "run,law,x0,y0,z0,vx0,vy0,vz0,m0,fuel_kg,landing_error_m,terminal_speed_mps,"
    "flight_time_s,steps,collided,completed,max_thrust_n,saturation_fraction,"
    "min_clearance_m";

inline void write_runs_csv(std::ostream& os, const MonteCarloResult& result) {
    using out_detail::num;
    os << kRunsCsvHeader << '\n';
    auto row = [&](std::size_t i, const char* law, const RunStats& s) {
        const LanderState& ic = result.initial_states[i];
        os << i << ',' << law << ',' << num(ic.r.x) << ',' << num(ic.r.y) << ','
           << num(ic.r.z) << ',' << num(ic.v.x) << ',' << num(ic.v.y) << ',' << num(ic.v.z)
           << ',' << num(ic.m) << ',' << num(s.fuel_used) << ',' << num(s.landing_error)
           << ',' << num(s.terminal_speed) << ',' << num(s.flight_time) << ','
           << s.run_time_steps << ',' << (s.collided ? 1 : 0) << ',' << (s.completed ? 1 : 0)
           << ',' << num(s.max_thrust) << ',' << num(s.saturation_fraction) << ','
           << num(s.min_clearance) << '\n';
    };
    for (std::size_t i = 0; i < result.initial_states.size(); ++i) {
        row(i, "otalg", result.otalg[i]);
        row(i, "classical", result.classical[i]);
    }
}

inline void write_runs_csv(const std::string& path, const MonteCarloResult& result) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    write_runs_csv(f, result);
}

inline void write_json(const std::string& path, const json& doc) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    f << doc.dump(2) << '\n';
}

} // namespace otalg

#endif
