// Command-line front end: closed-loop descent runs, Monte-Carlo dispersion
// batches and the barrier design report, all driven by a JSON configuration
// whose defaults reproduce the Martian-trench reference scenario.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otalg/otalg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCollision = 2;
constexpr int kExitAborted = 3;

struct NamedCase {
    const char* name;
    otalg::LanderState state;
};

// Reference initial conditions (Cases 1-3).
const NamedCase kCases[] = {
    {"case1", {{-769.42, -619.63, 2883.33}, {-16.78, -14.08, -83.36}, 1961.80, 0.0}},
    {"case2", {{269.35, -634.30, 2086.65}, {-4.98, 0.29, -70.89}, 1916.55, 0.0}},
    {"case3", {{823.91, 467.70, 2240.03}, {13.81, 24.28, -79.47}, 1959.43, 0.0}},
};

otalg::LanderState parse_ic(const std::string& text) {
    for (const NamedCase& c : kCases) {
        if (text == c.name)
            return c.state;
    }
    // inline form: rx,ry,rz,vx,vy,vz,m
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw otalg::ConfigError("--ic: cannot parse '" + tok + "' as a number");
        }
    }
    if (vals.size() != 7)
        throw otalg::ConfigError(
            "--ic: expected case1|case2|case3 or 'rx,ry,rz,vx,vy,vz,m'");
    otalg::LanderState s;
    s.r = {vals[0], vals[1], vals[2]};
    s.v = {vals[3], vals[4], vals[5]};
    s.m = vals[6];
    s.t = 0.0;
    return s;
}

std::filesystem::path prepare_out_dir(const std::string& out) {
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_simulate(const std::string& config_path, const std::string& ic_spec,
                 const std::string& out) {
    const otalg::RunConfig cfg = otalg::load_config(config_path);
    const otalg::ScenarioConfig scenario = cfg.scenario();
    const otalg::LanderState initial = parse_ic(ic_spec);

    const otalg::EpisodeResult res = otalg::run_episode(scenario, initial);

    const auto dir = prepare_out_dir(out);
    otalg::write_trajectory_csv((dir / "trajectory.csv").string(), res.log);
    otalg::json stats = otalg::run_stats_json(res.stats);
    stats["law"] = otalg::to_string(scenario.law);
    stats["ic"] = {{"r", {initial.r.x, initial.r.y, initial.r.z}},
                   {"v", {initial.v.x, initial.v.y, initial.v.z}},
                   {"m", initial.m}};
    otalg::write_json((dir / "run_stats.json").string(), stats);
    otalg::write_json((dir / "effective_config.json").string(), otalg::effective_config(cfg));

    std::printf("law=%s steps=%zu flight_time=%.2f s fuel=%.2f kg error=%.3f m "
                "speed=%.3f m/s collided=%d completed=%d\n",
                otalg::to_string(scenario.law), res.stats.run_time_steps,
                res.stats.flight_time, res.stats.fuel_used, res.stats.landing_error,
                res.stats.terminal_speed, res.stats.collided ? 1 : 0,
                res.stats.completed ? 1 : 0);

    if (!res.stats.completed)
        return kExitAborted;
    if (res.stats.collided)
        return kExitCollision;
    return kExitOk;
}

int cmd_montecarlo(const std::string& config_path, const std::string& out, bool perturb) {
    otalg::RunConfig cfg = otalg::load_config(config_path);
    if (perturb)
        cfg.env.perturbation_enabled = true;
    const otalg::ScenarioConfig scenario = cfg.scenario();

    const otalg::MonteCarloResult result = otalg::run_monte_carlo(scenario, cfg.mc);
    const otalg::BatchSummary sum_otalg = otalg::summarize(result.otalg);
    const otalg::BatchSummary sum_classical = otalg::summarize(result.classical);
    const otalg::PairedFuel pairs = otalg::paired_fuel(result);

    const auto dir = prepare_out_dir(out);
    otalg::write_runs_csv((dir / "runs.csv").string(), result);

    otalg::json summary;
    summary["n_runs"] = cfg.mc.runs;
    summary["seed"] = cfg.mc.seed;
    summary["perturbation"] = cfg.env.perturbation_enabled;
    summary["ic_redraws"] = result.redraws;
    summary["laws"] = {{"otalg", otalg::batch_summary_json(sum_otalg)},
                       {"classical", otalg::batch_summary_json(sum_classical)}};
    summary["pairs"] = {{"used", pairs.otalg.size()},
                        {"dropped_failed", pairs.dropped_failed},
                        {"dropped_collided", pairs.dropped_collided}};
    otalg::write_json((dir / "summary.json").string(), summary);

    otalg::json tdoc;
    tdoc["difference"] = "otalg_minus_classical";
    try {
        const otalg::TTestResult tt = otalg::paired_t_test(pairs.otalg, pairs.classical, 0.05);
        tdoc["result"] = otalg::ttest_json(tt);
        std::printf("paired t-test (fuel, otalg - classical, %zu pairs): d_bar=%.4f kg "
                    "se=%.4f t=%.4f t_crit=%.4f reject=%d\n",
                    tt.n, tt.d_bar, tt.se_d, tt.t, tt.t_crit, tt.reject ? 1 : 0);
    } catch (const otalg::DegenerateTestError& e) {
        tdoc["error"] = e.what();
        std::printf("paired t-test skipped: %s\n", e.what());
    } catch (const otalg::ValidationError& e) {
        tdoc["error"] = e.what();
        std::printf("paired t-test skipped: %s\n", e.what());
    }
    otalg::write_json((dir / "ttest.json").string(), tdoc);
    otalg::write_json((dir / "effective_config.json").string(), otalg::effective_config(cfg));

    std::printf("otalg:     collisions=%zu aborts=%zu median_fuel=%.2f kg\n",
                sum_otalg.collisions, sum_otalg.aborts, sum_otalg.fuel.median);
    std::printf("classical: collisions=%zu aborts=%zu median_fuel=%.2f kg\n",
                sum_classical.collisions, sum_classical.aborts, sum_classical.fuel.median);
    return kExitOk;
}

int cmd_design_report(const std::string& config_path, const std::string& out) {
    const otalg::RunConfig cfg = otalg::load_config(config_path);
    const double delta = cfg.resolve_delta();
    const double m0_ref = cfg.mc.m0.mean();
    const double t_max = cfg.env.t_max;

    otalg::json axes = otalg::json::array();
    const char* names[3] = {"x", "y", "z"};
    std::printf("barrier design report (m0_ref=%.1f kg, T_max=%.0f N)\n", m0_ref, t_max);
    std::printf("delta = %.4f m%s\n", delta,
                cfg.delta_is_literal ? "" : " (multiplier of d*)");
    for (int i = 0; i < 3; ++i) {
        const double l1 = cfg.gains.l1[i];
        const double l2 = cfg.gains.l2[i];
        const double l3 = cfg.gains.l3[i];
        const double dstar = otalg::critical_distance(l1, l2);
        const double phi_at_dstar = otalg::phi(dstar, l1, l2);
        const double bound_worst = otalg::min_thrust_bound(m0_ref, l3, 0.0);
        const double bound_dstar = otalg::min_thrust_bound(m0_ref, l3, phi_at_dstar);
        std::printf("axis %s: d*=%.4f m  phi(d*)=%.4f  bound(phi=0)=%.1f N [%s]  "
                    "bound(phi=phi(d*))=%.1f N [%s]\n",
                    names[i], dstar, phi_at_dstar, bound_worst,
                    bound_worst <= t_max ? "ok" : "not satisfied at worst case", bound_dstar,
                    bound_dstar <= t_max ? "ok" : "not satisfied");
        axes.push_back({{"axis", names[i]},
                        {"dstar_m", dstar},
                        {"phi_at_dstar", phi_at_dstar},
                        {"min_thrust_bound_phi0_n", bound_worst},
                        {"satisfied_phi0", bound_worst <= t_max},
                        {"min_thrust_bound_at_dstar_n", bound_dstar},
                        {"satisfied_at_dstar", bound_dstar <= t_max}});
    }

    otalg::json doc;
    doc["delta_m"] = delta;
    doc["m0_ref_kg"] = m0_ref;
    doc["t_max_n"] = t_max;
    doc["axes"] = axes;
    const auto dir = prepare_out_dir(out);
    otalg::write_json((dir / "design_report.json").string(), doc);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal terrain-avoidance landing guidance simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string ic = "case1";
    bool perturb = false;

    CLI::App* sim = app.add_subcommand("simulate", "Run one closed-loop descent");
    sim->add_option("config", config_path, "JSON run configuration")->required();
    sim->add_option("--ic", ic, "case1|case2|case3 or 'rx,ry,rz,vx,vy,vz,m'");
    sim->add_option("--out", out_dir, "output directory");

    CLI::App* mc = app.add_subcommand("montecarlo", "Paired dispersion batch over both laws");
    mc->add_option("config", config_path, "JSON run configuration")->required();
    mc->add_option("--out", out_dir, "output directory");
    mc->add_flag("--perturb", perturb, "enable the sinusoidal perturbation in both arms");

    CLI::App* rep = app.add_subcommand("design-report",
                                       "Critical distances and thrust bounds for the config");
    rep->add_option("config", config_path, "JSON run configuration")->required();
    rep->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, ic, out_dir);
        if (mc->parsed())
            return cmd_montecarlo(config_path, out_dir, perturb);
        if (rep->parsed())
            return cmd_design_report(config_path, out_dir);
    } catch (const otalg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const otalg::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAborted;
    }
    return kExitOk;
}
