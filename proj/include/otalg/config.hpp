#ifndef OTALG_CONFIG_HPP
#define OTALG_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "otalg/errors.hpp"
#include "otalg/guidance.hpp"
#include "otalg/simulation.hpp"
#include "otalg/terrain.hpp"

namespace otalg {

using json = nlohmann::json;

/// Full run configuration. Every field defaults to the Martian-trench
/// scenario, so an empty JSON document `{}` reproduces the reference setup.
/// The vertical margin delta is either a literal value in meters or a
/// multiplier of the critical distance ("1.2*dstar").
struct RunConfig {
    // terrain
    TerrainProfile profile{{{500.0, 600.0}, {1000.0, 1000.0}},
                           {{500.0, 600.0}, {1000.0, 1000.0}},
                           0.05 * M_PI / 180.0};
    std::vector<int> lambda_x{20, 6};
    std::vector<int> lambda_y{20, 6};
    bool delta_is_literal = false;
    double delta_literal = 0.0;
    double delta_multiplier = 1.2;

    GuidanceGains gains;
    EnvParams env;

    // scenario
    TargetSpec target;
    double dt = 0.01;
    double stop_altitude = 0.05;
    GuidanceLaw law = GuidanceLaw::Otalg;
    std::optional<double> t_go_guard; // absent -> 2*dt

    MonteCarloConfig mc;

    /// Resolved vertical margin: the multiplier applies to the largest
    /// critical distance over the three axes.
    double resolve_delta() const {
        if (delta_is_literal)
            return delta_literal;
        double dstar = 0.0;
        for (int i = 0; i < 3; ++i)
            dstar = std::max(dstar, critical_distance(gains.l1[i], gains.l2[i]));
        return delta_multiplier * dstar;
    }

    BarrierSet barriers() const {
        return build_barriers(profile, lambda_x, lambda_y, resolve_delta());
    }

    ScenarioConfig scenario() const {
        ScenarioConfig s;
        s.target = target;
        s.stop_altitude = stop_altitude;
        s.law = law;
        s.env = env;
        s.profile = profile;
        s.barriers = barriers();
        s.gains = gains;
        s.dt = dt;
        s.t_go_guard = t_go_guard.value_or(0.0);
        return s;
    }
};

namespace cfg_detail {

inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end())
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

inline double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw ConfigError("config: " + where + " must be a number");
    return v.get<double>();
}

inline Vec3 as_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3)
        throw ConfigError("config: " + where + " must be an array of 3 numbers");
    return {as_number(v[0], where), as_number(v[1], where), as_number(v[2], where)};
}

inline std::vector<TerrainStep> as_steps(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty())
        throw ConfigError("config: " + where + " must be a non-empty array of steps");
    std::vector<TerrainStep> steps;
    for (const json& e : v) {
        if (!e.is_object())
            throw ConfigError("config: entries of " + where + " must be objects");
        check_keys(e, where + " step", {"height", "width"});
        if (!e.contains("height") || !e.contains("width"))
            throw ConfigError("config: " + where + " step needs 'height' and 'width'");
        steps.push_back({as_number(e["height"], where + ".height"),
                         as_number(e["width"], where + ".width")});
    }
    return steps;
}

inline std::vector<int> as_lambdas(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty())
        throw ConfigError("config: " + where + " must be a non-empty array of integers");
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer())
            throw ConfigError("config: " + where + " entries must be integers");
        out.push_back(e.get<int>());
    }
    return out;
}

inline void parse_delta(const json& v, RunConfig& cfg) {
    if (v.is_number()) {
        cfg.delta_is_literal = true;
        cfg.delta_literal = v.get<double>();
        return;
    }
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto star = s.find('*');
        if (star != std::string::npos) {
            std::string mult = s.substr(0, star);
            std::string rest = s.substr(star + 1);
            const auto strip = [](std::string& t) {
                t.erase(0, t.find_first_not_of(" \t"));
                const auto e = t.find_last_not_of(" \t");
                if (e != std::string::npos)
                    t.erase(e + 1);
            };
            strip(mult);
            strip(rest);
            if (rest == "dstar") {
                try {
                    std::size_t used = 0;
                    const double m = std::stod(mult, &used);
                    if (used == mult.size() && m > 0.0) {
                        cfg.delta_is_literal = false;
                        cfg.delta_multiplier = m;
                        return;
                    }
                } catch (const std::exception&) {
                }
            }
        }
    }
    throw ConfigError("config: terrain.delta must be a number or '<mult>*dstar'");
}

inline NormalSpec as_normal(const json& v, const std::string& where) {
    if (!v.is_object())
        throw ConfigError("config: " + where + " must be an object");
    check_keys(v, where, {"mean", "std"});
    NormalSpec d;
    if (v.contains("mean"))
        d.mean = as_number(v["mean"], where + ".mean");
    if (v.contains("std"))
        d.stddev = as_number(v["std"], where + ".std");
    return d;
}

} // namespace cfg_detail

/// Parses a configuration document, rejecting unknown keys and reporting the
/// offending field. Absent sections keep their defaults.
inline RunConfig parse_config(const json& doc) {
    using namespace cfg_detail;
    if (!doc.is_object())
        throw ConfigError("config: top level must be a JSON object");
    check_keys(doc, "top level", {"terrain", "gains", "env", "scenario", "montecarlo"});

    RunConfig cfg;

    if (doc.contains("terrain")) {
        const json& t = doc["terrain"];
        if (!t.is_object())
            throw ConfigError("config: 'terrain' must be an object");
        check_keys(t, "'terrain'",
                   {"steps", "steps_x", "steps_y", "theta_deg", "lambda", "lambda_x",
                    "lambda_y", "delta"});
        if (t.contains("steps") && (t.contains("steps_x") || t.contains("steps_y")))
            throw ConfigError("config: terrain.steps conflicts with steps_x/steps_y");
        if (t.contains("steps")) {
            cfg.profile.steps_x = as_steps(t["steps"], "terrain.steps");
            cfg.profile.steps_y = cfg.profile.steps_x;
        }
        if (t.contains("steps_x"))
            cfg.profile.steps_x = as_steps(t["steps_x"], "terrain.steps_x");
        if (t.contains("steps_y"))
            cfg.profile.steps_y = as_steps(t["steps_y"], "terrain.steps_y");
        if (t.contains("theta_deg"))
            cfg.profile.plateau_angle =
                as_number(t["theta_deg"], "terrain.theta_deg") * M_PI / 180.0;
        if (t.contains("lambda") && (t.contains("lambda_x") || t.contains("lambda_y")))
            throw ConfigError("config: terrain.lambda conflicts with lambda_x/lambda_y");
        if (t.contains("lambda")) {
            cfg.lambda_x = as_lambdas(t["lambda"], "terrain.lambda");
            cfg.lambda_y = cfg.lambda_x;
        }
        if (t.contains("lambda_x"))
            cfg.lambda_x = as_lambdas(t["lambda_x"], "terrain.lambda_x");
        if (t.contains("lambda_y"))
            cfg.lambda_y = as_lambdas(t["lambda_y"], "terrain.lambda_y");
        if (t.contains("delta"))
            parse_delta(t["delta"], cfg);
    }

    if (doc.contains("gains")) {
        const json& g = doc["gains"];
        if (!g.is_object())
            throw ConfigError("config: 'gains' must be an object");
        check_keys(g, "'gains'", {"l1", "l2", "l3"});
        if (g.contains("l1"))
            cfg.gains.l1 = as_vec3(g["l1"], "gains.l1");
        if (g.contains("l2"))
            cfg.gains.l2 = as_vec3(g["l2"], "gains.l2");
        if (g.contains("l3"))
            cfg.gains.l3 = as_vec3(g["l3"], "gains.l3");
    }

    if (doc.contains("env")) {
        const json& e = doc["env"];
        if (!e.is_object())
            throw ConfigError("config: 'env' must be an object");
        check_keys(e, "'env'",
                   {"g", "g_e", "isp", "t_max", "perturbation", "perturb_raw_command"});
        if (e.contains("g"))
            cfg.env.g = as_vec3(e["g"], "env.g");
        if (e.contains("g_e"))
            cfg.env.g_e = as_number(e["g_e"], "env.g_e");
        if (e.contains("isp"))
            cfg.env.isp = as_number(e["isp"], "env.isp");
        if (e.contains("t_max"))
            cfg.env.t_max = as_number(e["t_max"], "env.t_max");
        if (e.contains("perturbation")) {
            if (!e["perturbation"].is_boolean())
                throw ConfigError("config: env.perturbation must be a boolean");
            cfg.env.perturbation_enabled = e["perturbation"].get<bool>();
        }
        if (e.contains("perturb_raw_command")) {
            if (!e["perturb_raw_command"].is_boolean())
                throw ConfigError("config: env.perturb_raw_command must be a boolean");
            cfg.env.perturb_raw_command = e["perturb_raw_command"].get<bool>();
        }
    }

    if (doc.contains("scenario")) {
        const json& s = doc["scenario"];
        if (!s.is_object())
            throw ConfigError("config: 'scenario' must be an object");
        check_keys(s, "'scenario'",
                   {"r_f", "v_f", "t_f", "dt", "stop_altitude", "law", "t_go_guard"});
        if (s.contains("r_f"))
            cfg.target.r_f = as_vec3(s["r_f"], "scenario.r_f");
        if (s.contains("v_f"))
            cfg.target.v_f = as_vec3(s["v_f"], "scenario.v_f");
        if (s.contains("t_f"))
            cfg.target.t_f = as_number(s["t_f"], "scenario.t_f");
        if (s.contains("dt"))
            cfg.dt = as_number(s["dt"], "scenario.dt");
        if (s.contains("stop_altitude"))
            cfg.stop_altitude = as_number(s["stop_altitude"], "scenario.stop_altitude");
        if (s.contains("law")) {
            if (!s["law"].is_string())
                throw ConfigError("config: scenario.law must be a string");
            const std::string l = s["law"].get<std::string>();
            if (l == "otalg")
                cfg.law = GuidanceLaw::Otalg;
            else if (l == "classical")
                cfg.law = GuidanceLaw::Classical;
            else
                throw ConfigError("config: scenario.law must be 'otalg' or 'classical'");
        }
        if (s.contains("t_go_guard"))
            cfg.t_go_guard = as_number(s["t_go_guard"], "scenario.t_go_guard");
    }

    if (doc.contains("montecarlo")) {
        const json& m = doc["montecarlo"];
        if (!m.is_object())
            throw ConfigError("config: 'montecarlo' must be an object");
        check_keys(m, "'montecarlo'",
                   {"runs", "seed", "x0", "y0", "z0", "vx0", "vy0", "vz0", "m0"});
        if (m.contains("runs")) {
            if (!m["runs"].is_number_integer() || m["runs"].get<long long>() < 0)
                throw ConfigError("config: montecarlo.runs must be a non-negative integer");
            cfg.mc.runs = m["runs"].get<std::size_t>();
        }
        if (m.contains("seed")) {
            if (!m["seed"].is_number_integer())
                throw ConfigError("config: montecarlo.seed must be an integer");
            cfg.mc.seed = m["seed"].get<std::uint64_t>();
        }
        if (m.contains("x0")) cfg.mc.x0 = cfg_detail::as_normal(m["x0"], "montecarlo.x0");
        if (m.contains("y0")) cfg.mc.y0 = cfg_detail::as_normal(m["y0"], "montecarlo.y0");
        if (m.contains("z0")) cfg.mc.z0 = cfg_detail::as_normal(m["z0"], "montecarlo.z0");
        if (m.contains("vx0")) cfg.mc.vx0 = cfg_detail::as_normal(m["vx0"], "montecarlo.vx0");
        if (m.contains("vy0")) cfg.mc.vy0 = cfg_detail::as_normal(m["vy0"], "montecarlo.vy0");
        if (m.contains("vz0")) cfg.mc.vz0 = cfg_detail::as_normal(m["vz0"], "montecarlo.vz0");
        if (m.contains("m0")) {
            const json& mm = m["m0"];
            if (!mm.is_object())
                throw ConfigError("config: montecarlo.m0 must be an object");
            cfg_detail::check_keys(mm, "montecarlo.m0", {"mean", "means", "std"});
            if (mm.contains("mean") && mm.contains("means"))
                throw ConfigError("config: montecarlo.m0 takes 'mean' or 'means', not both");
            if (mm.contains("mean"))
                cfg.mc.m0.means = {cfg_detail::as_number(mm["mean"], "montecarlo.m0.mean")};
            if (mm.contains("means")) {
                if (!mm["means"].is_array() || mm["means"].empty())
                    throw ConfigError("config: montecarlo.m0.means must be a non-empty array");
                cfg.mc.m0.means.clear();
                for (const json& e : mm["means"])
                    cfg.mc.m0.means.push_back(
                        cfg_detail::as_number(e, "montecarlo.m0.means"));
            }
            if (mm.contains("std"))
                cfg.mc.m0.stddev = cfg_detail::as_number(mm["std"], "montecarlo.m0.std");
        }
    }

    // Fail fast on inconsistent values; barrier construction re-validates
    // the terrain and margin together.
    cfg.profile.validate();
    cfg.gains.validate();
    cfg.env.validate();
    cfg.target.validate();
    cfg.mc.validate();
    if (!(cfg.dt > 0.0))
        throw ConfigError("config: scenario.dt must be positive");
    if (!(cfg.stop_altitude > 0.0))
        throw ConfigError("config: scenario.stop_altitude must be positive");
    try {
        (void)cfg.barriers();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(doc);
}

/// Effective configuration with all defaults merged in; reloading this
/// document reproduces the run exactly.
inline json effective_config(const RunConfig& cfg) {
    json t;
    auto steps_json = [](const std::vector<TerrainStep>& steps) {
        json a = json::array();
        for (const TerrainStep& s : steps)
            a.push_back({{"height", s.height}, {"width", s.width}});
        return a;
    };
    t["steps_x"] = steps_json(cfg.profile.steps_x);
    t["steps_y"] = steps_json(cfg.profile.steps_y);
    t["theta_deg"] = cfg.profile.plateau_angle * 180.0 / M_PI;
    t["lambda_x"] = cfg.lambda_x;
    t["lambda_y"] = cfg.lambda_y;
    if (cfg.delta_is_literal)
        t["delta"] = cfg.delta_literal;
    else
        t["delta"] = std::to_string(cfg.delta_multiplier) + "*dstar";

    auto vec_json = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };

    json doc;
    doc["terrain"] = t;
    doc["gains"] = {{"l1", vec_json(cfg.gains.l1)},
                    {"l2", vec_json(cfg.gains.l2)},
                    {"l3", vec_json(cfg.gains.l3)}};
    doc["env"] = {{"g", vec_json(cfg.env.g)},
                  {"g_e", cfg.env.g_e},
                  {"isp", cfg.env.isp},
                  {"t_max", cfg.env.t_max},
                  {"perturbation", cfg.env.perturbation_enabled},
                  {"perturb_raw_command", cfg.env.perturb_raw_command}};
    doc["scenario"] = {{"r_f", vec_json(cfg.target.r_f)},
                       {"v_f", vec_json(cfg.target.v_f)},
                       {"t_f", cfg.target.t_f},
                       {"dt", cfg.dt},
                       {"stop_altitude", cfg.stop_altitude},
                       {"law", to_string(cfg.law)}};
    if (cfg.t_go_guard)
        doc["scenario"]["t_go_guard"] = *cfg.t_go_guard;
    auto normal_json = [](const NormalSpec& n) {
        return json{{"mean", n.mean}, {"std", n.stddev}};
    };
    doc["montecarlo"] = {{"runs", cfg.mc.runs},
                         {"seed", cfg.mc.seed},
                         {"x0", normal_json(cfg.mc.x0)},
                         {"y0", normal_json(cfg.mc.y0)},
                         {"z0", normal_json(cfg.mc.z0)},
                         {"vx0", normal_json(cfg.mc.vx0)},
                         {"vy0", normal_json(cfg.mc.vy0)},
                         {"vz0", normal_json(cfg.mc.vz0)},
                         {"m0", {{"means", cfg.mc.m0.means}, {"std", cfg.mc.m0.stddev}}}};
    return doc;
}

} // namespace otalg

#endif
