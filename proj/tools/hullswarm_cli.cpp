#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hullswarm/hullswarm.hpp"

namespace fs = std::filesystem;
using namespace hullswarm;
using io::json;

namespace
{

enum ExitCode { ok = 0, usage_error = 1, check_failed = 2, diverged = 3 };

const std::vector<std::string> known_checks{"dini", "g2", "lemma7", "siss", "siiss", "tracking"};

struct RunConfig {
    std::string name;
    // Either a generator class name or a scenario document.
    std::string scenario = "ujlc";
    std::optional<std::string> scenario_file;
    Recipe recipe;
    double dt = 0;
    double horizon = 0;
    std::vector<std::string> checks;
    double eps = 1e-3;
    std::string out;
    bool plot = false;
};

struct RunResult {
    int code = ok;
    std::string message;
};

void apply_config(RunConfig &c, const json &j)
{
    if (!j.is_object()) {
        throw invalid_input("config must be an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (key == "name") {
            c.name = value.get<std::string>();
        } else if (key == "scenario") {
            if (value.is_string()) {
                c.scenario = value.get<std::string>();
            } else {
                c.recipe = io::recipe_from_json(value, c.recipe);
                c.scenario = to_string(c.recipe.kind);
            }
        } else if (key == "scenario_file") {
            c.scenario_file = value.get<std::string>();
        } else if (key == "dt") {
            c.dt = value.get<double>();
        } else if (key == "horizon") {
            c.horizon = value.get<double>();
        } else if (key == "checks") {
            c.checks = value.get<std::vector<std::string>>();
        } else if (key == "eps") {
            c.eps = value.get<double>();
        } else if (key == "out") {
            c.out = value.get<std::string>();
        } else if (key == "plot") {
            c.plot = value.get<bool>();
        } else if (key == "seed") {
            c.recipe.seed = value.get<std::uint64_t>();
        } else {
            throw invalid_input("unknown config key '" + key + "'");
        }
    }
}

Scenario load_scenario(RunConfig &c)
{
    if (c.scenario_file) {
        Scenario s = io::scenario_from_json(io::parse_json(io::read_file(*c.scenario_file), *c.scenario_file));
        c.recipe = s.recipe;
        return s;
    }
    if (fs::path(c.scenario).extension() == ".json") {
        c.scenario_file = c.scenario;
        return load_scenario(c);
    }
    c.recipe.kind = parse_scenario_class(c.scenario);
    if (c.recipe.kind == ScenarioClass::counterexample && c.recipe.disconnected_windows.empty()) {
        c.recipe.disconnected_windows = doubling_windows(5);
        c.recipe.tau_D = std::min(c.recipe.tau_D, 0.25);
    }
    if (c.horizon > 0 && c.recipe.kind != ScenarioClass::counterexample) {
        c.recipe.horizon = c.horizon;
    }
    return make_scenario(c.recipe);
}

BoundVerdict failed_precondition(const std::string &name, const std::string &why)
{
    BoundVerdict v;
    v.check_name = name;
    v.holds = false;
    v.max_violation = std::numeric_limits<double>::infinity();
    std::cerr << name << ": " << why << "\n";
    return v;
}

// Picks the SiISS envelope matching the schedule's connectivity.
SiissEnvelope choose_siiss_envelope(const Scenario &s, const CertificateBundle &b)
{
    const auto &sched = s.spec.schedule;
    if (b.T < sched.horizon() && classify_ujlc(sched, b.T)) {
        return siiss_envelope_ujlc(b);
    }
    if (!classify_jlc(sched)) {
        throw precondition_error("schedule is neither UJLC with the configured T nor JLC");
    }
    const auto marks = jlc_time_marks(sched);
    if (is_schedule_bidirectional(sched)) {
        return siiss_envelope_jlc(s.recipe.bounds, s.spec.n, sched.dwell(), marks, Connectivity::jlc_bidirectional);
    }
    if (is_union_acyclic(sched)) {
        return siiss_envelope_jlc(s.recipe.bounds, s.spec.n, sched.dwell(), marks, Connectivity::jlc_acyclic);
    }
    throw precondition_error("JLC schedule is neither bidirectional nor acyclic");
}

RunResult execute(RunConfig c)
{
    for (const auto &check : c.checks) {
        if (std::find(known_checks.begin(), known_checks.end(), check) == known_checks.end()) {
            return {usage_error, "unknown check '" + check + "'"};
        }
    }
    if (c.dt < 0 || c.horizon < 0 || !(c.eps > 0)) {
        return {usage_error, "dt and horizon must be positive and eps > 0"};
    }

    Scenario s;
    try {
        s = load_scenario(c);
    } catch (const std::exception &e) {
        return {usage_error, e.what()};
    }
    const double dt = c.dt > 0 ? c.dt : default_step(s.spec.schedule.dwell());
    const double t_end = c.horizon > 0 ? c.horizon : s.horizon;
    if (t_end > s.horizon * (1 + 1e-12)) {
        return {usage_error, "horizon exceeds the scenario's schedule horizon"};
    }

    Trajectory traj;
    try {
        traj = simulate(s.spec, s.x0, s.y0, dt, t_end);
    } catch (const divergence_error &e) {
        return {diverged, e.what()};
    } catch (const std::exception &e) {
        return {usage_error, e.what()};
    }
    const auto metrics = compute_metrics(traj, s.spec);

    std::optional<CertificateBundle> bundle;
    try {
        bundle = certify(s.recipe.bounds, s.spec.n, s.spec.schedule.dwell(), s.recipe.T);
    } catch (const std::exception &e) {
        std::cerr << "certificate: " << e.what() << "\n";
    }

    std::vector<BoundVerdict> verdicts;
    std::vector<double> envelope;
    for (const auto &check : c.checks) {
        try {
            if (check == "dini") {
                verdicts.push_back(check_dini_bound(metrics));
            } else if (check == "g2") {
                verdicts.push_back(check_g2_sandwich(metrics, s.spec.n, s.spec.k));
            } else if (check == "lemma7") {
                verdicts.push_back(check_lemma7(traj, metrics, 0));
            } else if (check == "tracking") {
                verdicts.push_back(tracking_verdict(metrics, c.eps));
            } else if (!bundle) {
                verdicts.push_back(failed_precondition(check, "no certificate for these parameters"));
            } else if (check == "siss") {
                auto v = verify_siss(metrics, s.spec, *bundle);
                if (envelope.empty()) {
                    for (std::size_t i = 0; i < v.margin_series.size(); ++i) {
                        envelope.push_back(metrics.dist[i] + v.margin_series[i]);
                    }
                }
                verdicts.push_back(std::move(v));
            } else if (check == "siiss") {
                const auto env = choose_siiss_envelope(s, *bundle);
                auto v = verify_siiss(metrics, s.spec, env);
                if (envelope.empty()) {
                    for (std::size_t i = 0; i < v.margin_series.size(); ++i) {
                        envelope.push_back(metrics.dist[i] + v.margin_series[i]);
                    }
                }
                verdicts.push_back(std::move(v));
                verdicts.push_back(verify_siiss_marks(metrics, s.spec, env));
            }
        } catch (const precondition_error &e) {
            verdicts.push_back(failed_precondition(check, e.what()));
        } catch (const certificate_failure &e) {
            verdicts.push_back(failed_precondition(check, e.what()));
        }
    }

    try {
        const fs::path out = c.out.empty() ? fs::path(".") : fs::path(c.out);
        fs::create_directories(out);
        io::write_file((out / "trajectory.csv").string(), io::trajectory_csv(traj));
        io::write_file((out / "metrics.csv").string(), io::metrics_csv(metrics));
        io::write_file((out / "scenario.json").string(), io::to_json(s).dump(2) + "\n");
        json cert = bundle ? io::to_json(*bundle) : json::object();
        io::write_file((out / "certificate.json").string(), cert.dump(2) + "\n");
        json report = {{"scenario", s.name}, {"checks", json::array()}};
        for (const auto &v : verdicts) {
            report["checks"].push_back(io::to_json(v));
        }
        io::write_file((out / "verdicts.json").string(), report.dump(2) + "\n");
        if (c.plot) {
            io::write_file((out / "plot.svg").string(), io::plot_svg(metrics, envelope));
        }
    } catch (const std::exception &e) {
        return {usage_error, e.what()};
    }

    RunResult r;
    r.message = s.name + ": final dist " + io::format_double(metrics.dist.back());
    for (const auto &v : verdicts) {
        r.message += "\n  " + v.check_name + (v.holds ? " holds" : " FAILS");
        if (!v.holds) {
            r.code = check_failed;
        }
    }
    return r;
}

int severity(int code)
{
    switch (code) {
        case usage_error:
            return 3;
        case diverged:
            return 2;
        case check_failed:
            return 1;
        default:
            return 0;
    }
}

int run_batch(const std::string &path, const RunConfig &defaults)
{
    json doc;
    try {
        doc = io::parse_json(io::read_file(path), path);
    } catch (const std::exception &e) {
        std::cerr << e.what() << "\n";
        return usage_error;
    }
    const json runs = doc.is_object() && doc.contains("runs") ? doc["runs"] : doc;
    if (!runs.is_array() || runs.empty()) {
        std::cerr << "batch file must hold a nonempty array of run configs\n";
        return usage_error;
    }
    std::vector<RunConfig> configs;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        RunConfig c = defaults;
        c.name = "run" + std::to_string(i + 1);
        try {
            apply_config(c, runs[i]);
        } catch (const std::exception &e) {
            std::cerr << "batch entry " << i + 1 << ": " << e.what() << "\n";
            return usage_error;
        }
        c.out = (fs::path(defaults.out.empty() ? "." : defaults.out) / c.name).string();
        configs.push_back(std::move(c));
    }
    std::vector<std::future<RunResult>> jobs;
    for (auto &c : configs) {
        jobs.push_back(std::async(std::launch::async, execute, c));
    }
    int code = ok;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto r = jobs[i].get();
        std::cout << "[" << configs[i].name << "] " << r.message << "\n";
        if (severity(r.code) > severity(code)) {
            code = r.code;
        }
    }
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Leader-hull tracking simulator with certificate checks"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char *env = std::getenv("HULLSWARM_OUT")) {
        cfg.out = env;
    }
    std::string config_path;
    std::string batch_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> n, k, d;
    std::optional<double> tau, T, scale;
    std::optional<std::string> input, weights;
    bool break_jlc = false;

    auto add_scenario_options = [&](CLI::App *sub) {
        sub->add_option("--scenario", cfg.scenario, "Generator (ujlc, counterexample, jlc_bidirectional, "
                                                    "jlc_acyclic) or a scenario .json file");
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--seed", seed, "Generator seed");
        sub->add_option("--n", n, "Followers");
        sub->add_option("--k", k, "Leaders");
        sub->add_option("--d", d, "State dimension");
        sub->add_option("--tau", tau, "Dwell time");
        sub->add_option("--T", T, "UJLC window used for the certificates");
        sub->add_option("--input", input, "Input shape: zero, c1, c2, bounded");
        sub->add_option("--input-scale", scale, "Input magnitude scale");
        sub->add_option("--weights", weights, "Weight functions: constant or distance");
        sub->add_flag("--break-jlc", break_jlc, "Isolate follower n in the JLC generators");
        sub->add_option("--horizon", cfg.horizon, "Simulated horizon");
        sub->add_option("--out", cfg.out, "Output directory (default $HULLSWARM_OUT or .)");
    };

    auto *run = app.add_subcommand("run", "Simulate a scenario and run checks");
    add_scenario_options(run);
    run->add_option("--dt", cfg.dt, "Integration step");
    run->add_option("--check", cfg.checks, "Check to run: dini, g2, lemma7, siss, siiss, tracking")->take_all();
    run->add_option("--eps", cfg.eps, "Tracking threshold");
    run->add_flag("--plot", cfg.plot, "Write plot.svg");
    run->add_option("--batch", batch_path, "JSON list of run configs executed concurrently");

    auto *exp = app.add_subcommand("export", "Write the generated scenario as JSON");
    add_scenario_options(exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? ok : usage_error;
    }

    try {
        if (!config_path.empty()) {
            RunConfig from_file = cfg;
            apply_config(from_file, io::parse_json(io::read_file(config_path), config_path));
            // Flags given on the command line win over the file.
            if (run->count("--scenario") || exp->count("--scenario")) {
                from_file.scenario = cfg.scenario;
            }
            if (run->count("--out") || exp->count("--out")) {
                from_file.out = cfg.out;
            }
            if (run->count("--check")) {
                from_file.checks = cfg.checks;
            }
            cfg = std::move(from_file);
        }
        if (seed) cfg.recipe.seed = *seed;
        if (n) cfg.recipe.n = *n;
        if (k) cfg.recipe.k = *k;
        if (d) cfg.recipe.d = *d;
        if (tau) cfg.recipe.tau_D = *tau;
        if (T) cfg.recipe.T = *T;
        if (scale) cfg.recipe.input_scale = *scale;
        if (input) cfg.recipe.input = parse_input_shape(*input);
        if (weights) cfg.recipe.weights = parse_weight_kind(*weights);
        if (break_jlc) cfg.recipe.break_jlc = true;
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage_error;
    }

    if (exp->parsed()) {
        try {
            const Scenario s = load_scenario(cfg);
            const fs::path out = cfg.out.empty() ? fs::path("scenario.json") : fs::path(cfg.out);
            if (out.has_parent_path()) {
                fs::create_directories(out.parent_path());
            }
            io::write_file(out.string(), io::to_json(s).dump(2) + "\n");
            std::cout << "wrote " << out.string() << "\n";
            return ok;
        } catch (const std::exception &e) {
            std::cerr << "export failed: " << e.what() << "\n";
            return usage_error;
        }
    }

    if (!batch_path.empty()) {
        return run_batch(batch_path, cfg);
    }
    const auto r = execute(cfg);
    if (r.code == usage_error || r.code == diverged) {
        std::cerr << "error: " << r.message << "\n";
    } else {
        std::cout << r.message << "\n";
    }
    return r.code;
}
