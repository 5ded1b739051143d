// Acceptance run: one PASS/FAIL line per criterion. The CLI path comes in as
// argv[1]; without it the CLI parts of criteria 9 and 13 are reported as failed.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hullswarm/hullswarm.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace hullswarm;

namespace
{

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string cli_path;
fs::path work_dir;

std::string fmt(double v, int digits = 3)
{
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

int run_cli(const std::string &args)
{
    const std::string cmd = "\"" + cli_path + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) {
        return -1;
    }
    return WEXITSTATUS(status);
}

struct Run {
    Scenario scenario;
    Trajectory traj;
    MetricSeries metrics;
};

Run simulate_scenario(const Recipe &r)
{
    Run run;
    run.scenario = make_scenario(r);
    const auto &sc = run.scenario;
    run.traj = simulate(sc.spec, sc.x0, sc.y0, default_step(sc.spec.schedule.dwell()), sc.horizon);
    run.metrics = compute_metrics(run.traj, sc.spec);
    return run;
}

struct Suite {
    std::vector<Run> ujlc_bounded;
    std::vector<Run> ujlc_zero;
    std::vector<Run> ujlc_decaying;
    std::vector<Run> jlc_bidirectional;
    std::vector<Run> jlc_acyclic;
    std::vector<Run> jlc_broken;
    Run counterexample;

    std::vector<const Run *> all() const
    {
        std::vector<const Run *> out;
        for (const auto *group : {&ujlc_bounded, &ujlc_zero, &ujlc_decaying, &jlc_bidirectional, &jlc_acyclic,
                                  &jlc_broken}) {
            for (const auto &r : *group) {
                out.push_back(&r);
            }
        }
        out.push_back(&counterexample);
        return out;
    }

    std::vector<const Run *> ujlc() const
    {
        std::vector<const Run *> out;
        for (const auto *group : {&ujlc_bounded, &ujlc_zero, &ujlc_decaying}) {
            for (const auto &r : *group) {
                out.push_back(&r);
            }
        }
        return out;
    }
};

Suite build_suite()
{
    Suite s;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Recipe r;
        r.seed = seed;
        r.input = InputShape::bounded;
        r.input_scale = 0.5;
        r.weights = seed % 2 ? WeightKind::constant : WeightKind::distance;
        s.ujlc_bounded.push_back(simulate_scenario(r));
    }
    struct Shape {
        int n, k, d;
        double tau, T;
    };
    for (const auto &sh : {Shape{2, 1, 1, 0.25, 0.5}, Shape{3, 2, 3, 0.5, 1.5}, Shape{5, 2, 2, 0.5, 2.5}}) {
        Recipe r;
        r.n = sh.n;
        r.k = sh.k;
        r.d = sh.d;
        r.tau_D = sh.tau;
        r.T = sh.T;
        r.seed = 100 + static_cast<std::uint64_t>(sh.n);
        s.ujlc_zero.push_back(simulate_scenario(r));
    }
    for (auto shape : {InputShape::c1, InputShape::c2, InputShape::c1}) {
        Recipe r;
        r.seed = 200 + s.ujlc_decaying.size();
        r.input = shape;
        r.input_scale = 1;
        s.ujlc_decaying.push_back(simulate_scenario(r));
    }
    for (auto kind : {ScenarioClass::jlc_bidirectional, ScenarioClass::jlc_acyclic}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Recipe r;
            r.kind = kind;
            r.seed = seed;
            r.input = InputShape::c1;
            r.input_scale = 1;
            (kind == ScenarioClass::jlc_bidirectional ? s.jlc_bidirectional : s.jlc_acyclic)
                .push_back(simulate_scenario(r));
            r.break_jlc = true;
            s.jlc_broken.push_back(simulate_scenario(r));
        }
    }
    Recipe r;
    r.kind = ScenarioClass::counterexample;
    r.tau_D = 0.25;
    r.disconnected_windows = doubling_windows(5);
    s.counterexample = simulate_scenario(r);
    return s;
}

CertificateBundle bundle_for(const Run &run)
{
    const auto &r = run.scenario.recipe;
    return certify(r.bounds, r.n, r.tau_D, r.T);
}

// 1. Projection against barycentric search, plus the variational inequality.
Outcome criterion_projection()
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> count(1, 5);
    double worst_gap = 0;
    double worst_vi = -1;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = dim(rng);
        const LeaderHull hull(oracle::random_matrix(count(rng), d, rng));
        const Point x = oracle::random_matrix(d, 1, rng, 4).col(0);
        const auto p = project(x, hull);
        worst_gap = std::max(worst_gap, std::abs(p.distance - oracle::grid_distance(x, hull.vertices())));
        for (Eigen::Index v = 0; v < hull.size(); ++v) {
            worst_vi = std::max(worst_vi, (x - p.nearest).dot(hull.vertex(v) - p.nearest));
        }
    }
    Outcome o;
    o.pass = worst_gap <= 1e-4 && worst_vi <= 1e-9;
    o.detail = "1000 instances, max |dist - grid| = " + fmt(worst_gap) + ", max residual = " + fmt(worst_vi);
    return o;
}

// 2. Neighbor inequality on random triples.
Outcome criterion_neighbor_inequality()
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> count(1, 5);
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10000; ++trial) {
        const int d = dim(rng);
        const LeaderHull hull(oracle::random_matrix(count(rng), d, rng));
        const Point a = oracle::random_matrix(d, 1, rng, 4).col(0);
        const Point b = oracle::random_matrix(d, 1, rng, 4).col(0);
        const auto r = neighbor_inequality(a, b, hull);
        worst = std::max(worst, r.lhs - r.rhs);
        if (r.lhs > r.rhs + 1e-9 || (r.sharp_applies && r.lhs > r.sharp_rhs + 1e-9)) {
            ++violations;
        }
    }
    return {violations == 0, "10000 triples, violations = " + std::to_string(violations)
                                 + ", max lhs - rhs = " + fmt(worst)};
}

// 3. Gradient of the squared distance against central differences.
Outcome criterion_gradient()
{
    std::mt19937_64 rng(91);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> count(1, 5);
    double worst = 0;
    int checked = 0;
    while (checked < 500) {
        const int d = dim(rng);
        const LeaderHull hull(oracle::random_matrix(count(rng), d, rng));
        const Point x = oracle::random_matrix(d, 1, rng, 4).col(0);
        if (distance(x, hull) <= 1e-3) {
            continue;
        }
        const Point g = sq_distance_gradient(x, hull);
        Point fd(d);
        const double h = 1e-6;
        for (int c = 0; c < d; ++c) {
            Point e = Point::Zero(d);
            e(c) = h;
            const double up = distance(x + e, hull);
            const double down = distance(x - e, hull);
            fd(c) = (up * up - down * down) / (2 * h);
        }
        worst = std::max(worst, (g - fd).norm() / g.norm());
        ++checked;
    }
    return {worst <= 1e-4, "500 instances, max relative error = " + fmt(worst)};
}

// 4. Dini bound across the suite.
Outcome criterion_dini(const Suite &s)
{
    Outcome o;
    double worst = -std::numeric_limits<double>::infinity();
    const auto runs = s.all();
    for (const auto *r : runs) {
        const auto v = check_dini_bound(r->metrics);
        worst = std::max(worst, v.max_violation);
        if (!v.holds) {
            o.pass = false;
            o.detail += r->scenario.name + " fails; ";
        }
    }
    o.pass = o.pass && runs.size() >= 20;
    o.detail += std::to_string(runs.size()) + " scenarios, max (rate - q) = " + fmt(worst);
    return o;
}

// 5. Norm sandwich across the suite.
Outcome criterion_g2(const Suite &s)
{
    Outcome o;
    double worst = -std::numeric_limits<double>::infinity();
    const auto runs = s.all();
    for (const auto *r : runs) {
        const auto v = check_g2_sandwich(r->metrics, r->scenario.spec.n, r->scenario.spec.k);
        worst = std::max(worst, v.max_violation);
        if (!v.holds) {
            o.pass = false;
            o.detail += r->scenario.name + " fails; ";
        }
    }
    o.pass = o.pass && runs.size() >= 20;
    o.detail += std::to_string(runs.size()) + " scenarios, max violation = " + fmt(worst);
    return o;
}

// 6. One-period contraction without input.
Outcome criterion_contraction(const Suite &s)
{
    Outcome o;
    for (const auto &r : s.ujlc_zero) {
        const auto b = bundle_for(r);
        const auto wc = check_window_contraction(r.metrics, r.scenario.spec, b);
        o.pass = o.pass && wc.verdict.holds;
        o.detail += r.scenario.name + ": worst factor " + fmt(wc.worst_factor) + " vs eta* = 1 - "
                    + fmt(b.eta_star.gap()) + (wc.verdict.holds ? "" : " FAILS") + "; ";
    }
    return o;
}

// 7. SISS envelope with bounded input.
Outcome criterion_siss(const Suite &s)
{
    Outcome o;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto &r : s.ujlc_bounded) {
        const auto v = verify_siss(r.metrics, r.scenario.spec, bundle_for(r));
        for (double m : v.margin_series) {
            min_margin = std::min(min_margin, m);
        }
        if (!v.holds) {
            o.pass = false;
            o.detail += r.scenario.name + " fails; ";
        }
    }
    o.pass = o.pass && s.ujlc_bounded.size() >= 10 && min_margin >= 0;
    o.detail += std::to_string(s.ujlc_bounded.size()) + " UJLC scenarios, min margin = " + fmt(min_margin);
    return o;
}

// 8. Integral envelopes: UJLC form and the JLC recursion at the marks.
Outcome criterion_siiss(const Suite &s)
{
    Outcome o;
    int ujlc_runs = 0;
    for (const auto *r : s.ujlc()) {
        const auto env = siiss_envelope_ujlc(bundle_for(*r));
        const auto v = verify_siiss(r->metrics, r->scenario.spec, env);
        const auto marks = verify_siiss_marks(r->metrics, r->scenario.spec, env);
        ++ujlc_runs;
        if (!v.holds || !marks.holds) {
            o.pass = false;
            o.detail += r->scenario.name + " fails; ";
        }
    }
    int jlc_runs = 0;
    int mark_count = 0;
    for (const auto *group : {&s.jlc_bidirectional, &s.jlc_acyclic}) {
        for (const auto &r : *group) {
            const auto &sched = r.scenario.spec.schedule;
            const auto kind = group == &s.jlc_bidirectional ? Connectivity::jlc_bidirectional
                                                             : Connectivity::jlc_acyclic;
            const auto env = siiss_envelope_jlc(r.scenario.recipe.bounds, r.scenario.spec.n, sched.dwell(),
                                                jlc_time_marks(sched), kind);
            const auto v = verify_siiss_marks(r.metrics, r.scenario.spec, env);
            const auto cont = verify_siiss(r.metrics, r.scenario.spec, env);
            mark_count += static_cast<int>(env.marks.size()) - 1;
            ++jlc_runs;
            if (!v.holds || !cont.holds) {
                o.pass = false;
                o.detail += r.scenario.name + " fails; ";
            }
        }
    }
    o.detail += std::to_string(ujlc_runs) + " UJLC runs with gain (4n+1)sqrt(2), " + std::to_string(jlc_runs)
                + " JLC runs, " + std::to_string(mark_count) + " recursion marks";
    return o;
}

// 9. Counterexample: growth over every disconnected window, and the CLI exit code.
Outcome criterion_counterexample(const Suite &s)
{
    Outcome o;
    const auto &r = s.counterexample;
    const auto gaps = disconnected_intervals(r.scenario);
    const double drift = std::sqrt(double(r.scenario.spec.d));
    double min_ratio = std::numeric_limits<double>::infinity();
    if (gaps.size() < 5) {
        return {false, "fewer than five disconnected windows"};
    }
    for (std::size_t kappa = 0; kappa < 5; ++kappa) {
        const auto [a, b] = gaps[kappa];
        const double growth = sample_at(r.metrics.times, r.metrics.dist, b)
                              - sample_at(r.metrics.times, r.metrics.dist, a);
        const double needed = 0.9 * (b - a) * drift;
        min_ratio = std::min(min_ratio, growth / ((b - a) * drift));
        if (!(growth > needed)) {
            o.pass = false;
        }
    }
    int code = -1;
    if (!cli_path.empty()) {
        code = run_cli("run --scenario counterexample --check siss --out \"" + (work_dir / "counterexample").string()
                       + "\"");
    }
    o.pass = o.pass && code == 2;
    o.detail = "min growth / (window length x drift) = " + fmt(min_ratio) + " over 5 windows, final dist "
               + fmt(r.metrics.dist.back()) + ", CLI siss exit " + std::to_string(code);
    return o;
}

// 10. Set tracking with decaying input, and failure once JLC is broken.
Outcome criterion_tracking(const Suite &s)
{
    Outcome o;
    const double eps = 1e-3;
    int tracked = 0;
    double latest_entry = 0;
    for (const auto *group : {&s.jlc_bidirectional, &s.jlc_acyclic}) {
        for (const auto &r : *group) {
            const auto t = detect_set_tracking(r.metrics, eps);
            if (t.achieved) {
                ++tracked;
                latest_entry = std::max(latest_entry, *t.entry_time);
            } else {
                o.pass = false;
                o.detail += r.scenario.name + " does not track; ";
            }
        }
    }
    int broken_failing = 0;
    for (const auto &r : s.jlc_broken) {
        if (!detect_set_tracking(r.metrics, eps).achieved) {
            ++broken_failing;
        } else {
            o.pass = false;
            o.detail += r.scenario.name + " tracks although broken; ";
        }
    }
    o.pass = o.pass && s.jlc_bidirectional.size() == 5 && s.jlc_acyclic.size() == 5;
    o.detail += std::to_string(tracked) + "/10 track (latest entry t = " + fmt(latest_entry) + "), "
                + std::to_string(broken_failing) + "/" + std::to_string(s.jlc_broken.size()) + " broken runs fail";
    return o;
}

// 11. Shapes of the rate functions, chain ranges, and gamma1 > c0.
Outcome criterion_rate_shapes()
{
    Outcome o;
    int grids = 0;
    auto fail = [&](const std::string &what) {
        o.pass = false;
        o.detail += what + "; ";
    };
    struct Case {
        WeightBounds b;
        int n;
        double tau, T;
    };
    for (const auto &c : {Case{{1, 1, 1}, 2, 1, 1}, Case{{0.5, 1, 2}, 3, 0.5, 1}, Case{{0.3, 1.5, 0.8}, 5, 0.2, 1},
                          Case{{0.5, 1, 1}, 4, 0.5, 2}}) {
        const auto bundle = certify(c.b, c.n, c.tau, c.T);
        const auto p = bundle.rate_params();
        const auto up = bundle.eta_chain.front();
        const auto eps = Contraction::from_value(0.4);
        if (!(leader_link_factor(0, p).value() == 1 && relay_link_factor(0, up, p).value() == 1
              && leader_dwell_factor(0, p).value() == 1 && relay_dwell_factor(up, 0, p).value() == 1)) {
            fail("value at 0 is not 1");
        }
        if (relapse_factor(eps, 0, p) != eps) {
            fail("relapse factor at 0 is not eps");
        }
        const int N = 1000;
        for (int i = 1; i <= N; ++i) {
            const double s0 = p.T_star * (i - 1) / N;
            const double s1 = p.T_star * i / N;
            const bool falling = s1 <= p.tau_D;
            const bool rising = s0 >= p.tau_D;
            auto ordered = [&](const Contraction &a, const Contraction &b) {
                return falling ? b < a : rising ? b > a : true;
            };
            if (!ordered(leader_link_factor(s0, p), leader_link_factor(s1, p))
                || !ordered(relay_link_factor(s0, up, p), relay_link_factor(s1, up, p))) {
                fail("link factor not monotone on its segment");
                break;
            }
            // Past lambda s of about 37 consecutive values agree to double precision,
            // so strict decrease is required on the dwell segment only.
            const auto l0 = leader_dwell_factor(s0, p), l1 = leader_dwell_factor(s1, p);
            const auto r0 = relay_dwell_factor(up, s0, p), r1 = relay_dwell_factor(up, s1, p);
            if (l1 > l0 || r1 > r0 || (falling && !(l1 < l0 && r1 < r0))) {
                fail("dwell factor not decreasing");
                break;
            }
            if (!(relapse_factor(eps, s1, p) > relapse_factor(eps, s0, p))) {
                fail("relapse factor not increasing");
                break;
            }
        }
        for (const auto &last : {leader_link_factor(p.T_star, p), relay_link_factor(p.T_star, up, p),
                                 leader_dwell_factor(p.T_star, p), relapse_factor(eps, p.T_star, p)}) {
            if (!last.strictly_inside_unit_interval()) {
                fail("final value not below 1");
            }
        }
        for (const auto *chain : {&bundle.eta_chain, &bundle.c_chain, &bundle.delta_chain, &bundle.d_chain}) {
            for (const auto &v : *chain) {
                if (!v.strictly_inside_unit_interval()) {
                    fail("chain constant outside (0, 1)");
                }
            }
        }
        if (!(bundle.gamma1 > bundle.c0)) {
            fail("gamma1 <= c0");
        }
        ++grids;
    }
    o.detail += std::to_string(grids) + " parameter sets on a 1000-point grid";
    return o;
}

// 12. Acyclic partition against the arc-origin validator.
Outcome criterion_partition()
{
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> nf(2, 7);
    std::uniform_int_distribution<int> nl(1, 3);
    int ok = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = oracle::random_acyclic(nf(rng), nl(rng), rng);
        if (!oracle::l_connected_by_paths(g)) {
            continue;
        }
        if (oracle::partition_valid(g, acyclic_partition(g))) {
            ++ok;
        }
    }
    return {ok == 200, std::to_string(ok) + "/200 partitions valid"};
}

bool same_file(const fs::path &a, const fs::path &b)
{
    return io::read_file(a.string()) == io::read_file(b.string());
}

// 13. Determinism and lossless reloading of every emitted file.
Outcome criterion_round_trip()
{
    Outcome o;
    auto fail = [&](const std::string &what) {
        o.pass = false;
        o.detail += what + "; ";
    };
    Recipe r;
    r.kind = ScenarioClass::jlc_acyclic;
    r.seed = 5;
    r.input = InputShape::c2;
    r.input_scale = 1;
    r.horizon = 20;
    const auto a = simulate_scenario(r);
    const auto b = simulate_scenario(r);
    if (io::trajectory_csv(a.traj) != io::trajectory_csv(b.traj) || io::metrics_csv(a.metrics) != io::metrics_csv(b.metrics)) {
        fail("library runs differ");
    }

    if (cli_path.empty()) {
        fail("no CLI path given");
        return o;
    }
    const auto d1 = work_dir / "det1";
    const auto d2 = work_dir / "det2";
    const std::string args = "run --scenario ujlc --seed 3 --input bounded --input-scale 0.5 --plot "
                             "--check dini g2 siss siiss tracking --out ";
    const int c1 = run_cli(args + "\"" + d1.string() + "\"");
    const int c2 = run_cli(args + "\"" + d2.string() + "\"");
    if (c1 < 0 || c1 == 1 || c1 == 3 || c2 != c1) {
        fail("CLI exit codes " + std::to_string(c1) + ", " + std::to_string(c2));
        return o;
    }
    int files = 0;
    for (const char *name : {"trajectory.csv", "metrics.csv", "scenario.json", "certificate.json", "verdicts.json",
                             "plot.svg"}) {
        if (!same_file(d1 / name, d2 / name)) {
            fail(std::string(name) + " differs between runs");
        }
        ++files;
    }
    try {
        const auto traj_text = io::read_file((d1 / "trajectory.csv").string());
        if (io::trajectory_csv(io::parse_trajectory_csv(traj_text)) != traj_text) {
            fail("trajectory.csv does not reload exactly");
        }
        const auto scen_json = io::parse_json(io::read_file((d1 / "scenario.json").string()), "scenario");
        const auto scen = io::scenario_from_json(scen_json);
        if (io::to_json(scen) != scen_json) {
            fail("scenario.json does not reload exactly");
        }
        const auto metrics_text = io::read_file((d1 / "metrics.csv").string());
        if (io::metrics_csv(io::parse_metrics_csv(metrics_text, scen.spec.k)) != metrics_text) {
            fail("metrics.csv does not reload exactly");
        }
        // The reloaded scenario reproduces the emitted trajectory.
        const auto again = simulate(scen.spec, scen.x0, scen.y0, default_step(scen.spec.schedule.dwell()), scen.horizon);
        if (io::trajectory_csv(again) != traj_text) {
            fail("reloaded scenario does not reproduce trajectory.csv");
        }
        const auto cert_json = io::parse_json(io::read_file((d1 / "certificate.json").string()), "certificate");
        if (io::to_json(io::certificate_from_json(cert_json)) != cert_json) {
            fail("certificate.json does not reload exactly");
        }
        const auto verdicts = io::parse_json(io::read_file((d1 / "verdicts.json").string()), "verdicts");
        for (const auto &v : verdicts.at("checks")) {
            if (io::to_json(io::verdict_from_json(v)) != v) {
                fail("verdicts.json entry does not reload exactly");
            }
        }
        const auto svg = io::read_file((d1 / "plot.svg").string());
        if (svg.rfind("<svg", 0) != 0 || svg.find("</svg>") == std::string::npos) {
            fail("plot.svg is not a complete SVG document");
        }
    } catch (const std::exception &e) {
        fail(std::string("reload error: ") + e.what());
    }
    o.detail += std::to_string(files) + " CLI files byte-identical across runs and reloaded";
    return o;
}

} // namespace

int main(int argc, char **argv)
{
    if (argc > 1) {
        cli_path = argv[1];
    }
    work_dir = fs::temp_directory_path() / "hullswarm_acceptance";
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);

    int failures = 0;
    auto report = [&](int id, const char *title, const std::function<Outcome()> &fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ". " << title << ": " << o.detail << " ("
                  << fmt(secs, 2) << " s)" << std::endl;
        if (!o.pass) {
            ++failures;
        }
    };

    report(1, "projection matches barycentric search", criterion_projection);
    report(2, "neighbor inequality", criterion_neighbor_inequality);
    report(3, "squared-distance gradient", criterion_gradient);

    const auto start = std::chrono::steady_clock::now();
    const Suite suite = build_suite();
    std::cout << "       scenario suite: " << suite.all().size() << " runs simulated in "
              << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 2) << " s"
              << std::endl;

    report(4, "Dini bound on the distance", [&] { return criterion_dini(suite); });
    report(5, "norm sandwich", [&] { return criterion_g2(suite); });
    report(6, "one-period contraction without input", [&] { return criterion_contraction(suite); });
    report(7, "SISS envelope with bounded input", [&] { return criterion_siss(suite); });
    report(8, "SiISS envelopes", [&] { return criterion_siiss(suite); });
    report(9, "counterexample divergence", [&] { return criterion_counterexample(suite); });
    report(10, "set tracking under JLC with decaying input", [&] { return criterion_tracking(suite); });
    report(11, "rate-function shapes and chain ranges", criterion_rate_shapes);
    report(12, "acyclic partition", criterion_partition);
    report(13, "determinism and round trip", criterion_round_trip);

    std::cout << (failures == 0 ? "all 13 criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
