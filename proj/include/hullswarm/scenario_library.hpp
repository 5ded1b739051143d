#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "agent_dynamics.hpp"
#include "errors.hpp"
#include "switching_topology.hpp"

namespace hullswarm
{

enum class ScenarioClass { ujlc, counterexample, jlc_bidirectional, jlc_acyclic };
enum class InputShape { zero, constant_ones, c1, c2, bounded };
enum class WeightKind { constant, distance };
enum class Expected { siss, siiss, tracking, divergence, no_tracking };

inline const char *to_string(ScenarioClass c)
{
    switch (c) {
        case ScenarioClass::ujlc:
            return "ujlc";
        case ScenarioClass::counterexample:
            return "counterexample";
        case ScenarioClass::jlc_bidirectional:
            return "jlc_bidirectional";
        case ScenarioClass::jlc_acyclic:
            return "jlc_acyclic";
    }
    return "?";
}

inline const char *to_string(InputShape s)
{
    switch (s) {
        case InputShape::zero:
            return "zero";
        case InputShape::constant_ones:
            return "constant_ones";
        case InputShape::c1:
            return "c1";
        case InputShape::c2:
            return "c2";
        case InputShape::bounded:
            return "bounded";
    }
    return "?";
}

inline const char *to_string(WeightKind w)
{
    return w == WeightKind::constant ? "constant" : "distance";
}

inline const char *to_string(Expected e)
{
    switch (e) {
        case Expected::siss:
            return "siss";
        case Expected::siiss:
            return "siiss";
        case Expected::tracking:
            return "tracking";
        case Expected::divergence:
            return "divergence";
        case Expected::no_tracking:
            return "no_tracking";
    }
    return "?";
}

namespace detail
{

template <class E, std::size_t N>
E parse_enum(const std::string &text, const E (&values)[N], const char *what)
{
    for (E v : values) {
        if (text == to_string(v)) {
            return v;
        }
    }
    throw invalid_input(std::string("unknown ") + what + " '" + text + "'");
}

} // namespace detail

inline ScenarioClass parse_scenario_class(const std::string &s)
{
    constexpr ScenarioClass all[] = {ScenarioClass::ujlc, ScenarioClass::counterexample,
                                     ScenarioClass::jlc_bidirectional, ScenarioClass::jlc_acyclic};
    return detail::parse_enum(s, all, "scenario class");
}

inline InputShape parse_input_shape(const std::string &s)
{
    constexpr InputShape all[] = {InputShape::zero, InputShape::constant_ones, InputShape::c1, InputShape::c2,
                                  InputShape::bounded};
    return detail::parse_enum(s, all, "input shape");
}

inline WeightKind parse_weight_kind(const std::string &s)
{
    constexpr WeightKind all[] = {WeightKind::constant, WeightKind::distance};
    return detail::parse_enum(s, all, "weight kind");
}

inline Expected parse_expected(const std::string &s)
{
    constexpr Expected all[] = {Expected::siss, Expected::siiss, Expected::tracking, Expected::divergence,
                                Expected::no_tracking};
    return detail::parse_enum(s, all, "expected behavior");
}

// Everything needed to rebuild a scenario bit for bit.
struct Recipe {
    ScenarioClass kind = ScenarioClass::ujlc;
    int n = 4;
    int k = 3;
    int d = 2;
    double tau_D = 0.5;
    // UJLC window; also the window the SISS/SiISS certificates are built for.
    double T = 2;
    std::uint64_t seed = 1;
    WeightBounds bounds{0.5, 1.0, 1.0};
    WeightKind weights = WeightKind::constant;
    InputShape input = InputShape::zero;
    double input_scale = 0;
    // Lengths of the disconnected windows of the counterexample.
    std::vector<double> disconnected_windows;
    // JLC classes: drop every arc touching follower n.
    bool break_jlc = false;
    // 0 selects the generator default.
    double horizon = 0;

    bool operator==(const Recipe &) const = default;
};

struct Scenario {
    std::string name;
    Recipe recipe;
    SystemSpec spec;
    StateMatrix x0;
    StateMatrix y0;
    double horizon = 0;
    Expected expected = Expected::siss;
};

struct InputFunctions {
    LeaderInputFn leader_input;
    DisturbanceFn disturbance;
};

// |z(t)| as a function of time for the shapes with a closed form.
inline double input_magnitude(InputShape shape, double scale, double t)
{
    switch (shape) {
        case InputShape::zero:
            return 0;
        case InputShape::c1:
            return scale * std::exp(-t);
        case InputShape::c2:
            return scale / (1 + t);
        case InputShape::bounded:
            return scale;
        case InputShape::constant_ones:
            break;
    }
    throw invalid_input("input_magnitude: constant_ones has no scale-only magnitude");
}

// int_0^T |z| for the shapes with a closed form.
inline double input_integral(InputShape shape, double scale, double T)
{
    switch (shape) {
        case InputShape::zero:
            return 0;
        case InputShape::c1:
            return scale * -std::expm1(-T);
        case InputShape::c2:
            return scale * std::log1p(T);
        case InputShape::bounded:
            return scale * T;
        case InputShape::constant_ones:
            break;
    }
    throw invalid_input("input_integral: constant_ones has no scale-only integral");
}

// Inputs whose stacked norm |z(t)| follows input_magnitude: the magnitude is
// split evenly over the n + k agents along seeded unit directions. The
// bounded shape rotates each direction in the first coordinate plane.
inline InputFunctions make_inputs(InputShape shape, double scale, int n, int k, int d, std::uint64_t seed)
{
    if (!(scale >= 0)) {
        throw invalid_input("make_inputs: scale must be nonnegative");
    }
    if (n < 1 || k < 1 || d < 1) {
        throw invalid_input("make_inputs: n, k, d must be positive");
    }
    if (shape == InputShape::constant_ones) {
        return {[d](int, const StateMatrix &, double) -> Point { return Point::Ones(d); },
                [d](int, double) -> Point { return Point::Zero(d); }};
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> phase(0, 2 * std::numbers::pi);
    auto unit = [&] {
        Point v(d);
        do {
            for (int c = 0; c < d; ++c) {
                v(c) = gauss(rng);
            }
        } while (v.norm() < 1e-8);
        return Point(v / v.norm());
    };
    std::vector<Point> dirs;
    std::vector<double> phases;
    for (int a = 0; a < n + k; ++a) {
        dirs.push_back(unit());
        phases.push_back(phase(rng));
    }
    const double share = 1 / std::sqrt(double(n + k));
    auto signal = [shape, scale, share, dirs, phases, d](int agent, double t) -> Point {
        const auto a = static_cast<std::size_t>(agent);
        if (shape == InputShape::bounded) {
            Point v = Point::Zero(d);
            if (d == 1) {
                v(0) = std::cos(t + phases[a]);
            } else {
                v(0) = std::cos(t + phases[a]);
                v(1) = std::sin(t + phases[a]);
            }
            return scale * share * v;
        }
        return input_magnitude(shape, scale, t) * share * dirs[a];
    };
    return {[signal](int i, const StateMatrix &, double t) { return signal(i - 1, t); },
            [signal, k](int i, double t) { return signal(k + i - 1, t); }};
}

inline InputFunctions make_inputs_c1(double scale, int n, int k, int d, std::uint64_t seed)
{
    return make_inputs(InputShape::c1, scale, n, k, d, seed);
}

inline InputFunctions make_inputs_c2(double scale, int n, int k, int d, std::uint64_t seed)
{
    return make_inputs(InputShape::c2, scale, n, k, d, seed);
}

namespace detail
{

inline void check_recipe(const Recipe &r)
{
    if (r.n < 2 || r.k < 1 || r.d < 1) {
        throw invalid_input("scenario: need n >= 2, k >= 1, d >= 1");
    }
    if (!(r.tau_D > 0) || !(r.T > 0)) {
        throw invalid_input("scenario: tau_D and T must be positive");
    }
    r.bounds.validate();
    if (r.horizon < 0) {
        throw invalid_input("scenario: horizon must be nonnegative");
    }
}

// Constant weights sit at the midpoint of [a_lo, a_hi]; leader arcs use 2 b_lo.
inline std::pair<WeightFn, WeightFn> weight_functions(const Recipe &r)
{
    if (r.weights == WeightKind::constant) {
        return {weights::constant(0.5 * (r.bounds.a_lo + r.bounds.a_hi)), weights::constant(2 * r.bounds.b_lo)};
    }
    return {weights::distance_follower(r.bounds.a_lo, r.bounds.a_hi), weights::distance_leader(r.bounds.b_lo)};
}

// Followers on the radius-5 sphere, leaders uniform in [-1, 1]^d.
inline std::pair<StateMatrix, StateMatrix> spread_initial_states(const Recipe &r, std::mt19937_64 &rng)
{
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> box(-1, 1);
    StateMatrix x0(r.n, r.d);
    for (int i = 0; i < r.n; ++i) {
        Point v(r.d);
        do {
            for (int c = 0; c < r.d; ++c) {
                v(c) = gauss(rng);
            }
        } while (v.norm() < 1e-8);
        x0.row(i) = (5 * v / v.norm()).transpose();
    }
    StateMatrix y0(r.k, r.d);
    for (int i = 0; i < r.k; ++i) {
        for (int c = 0; c < r.d; ++c) {
            y0(i, c) = box(rng);
        }
    }
    return {x0, y0};
}

inline int uniform_int(std::mt19937_64 &rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

} // namespace detail

// Assembles a scenario from a recipe and an explicit schedule and initial
// state, then checks that the schedule has the claimed connectivity class.
inline Scenario assemble_scenario(const Recipe &r, SwitchingSchedule schedule, StateMatrix x0, StateMatrix y0)
{
    detail::check_recipe(r);
    Scenario s;
    s.recipe = r;
    s.horizon = schedule.horizon();
    s.x0 = std::move(x0);
    s.y0 = std::move(y0);

    auto [wa, wb] = detail::weight_functions(r);
    const InputShape shape = r.kind == ScenarioClass::counterexample ? InputShape::constant_ones : r.input;
    auto inputs = make_inputs(shape, r.input_scale, r.n, r.k, r.d, r.seed);
    s.spec.n = r.n;
    s.spec.k = r.k;
    s.spec.d = r.d;
    s.spec.bounds = r.bounds;
    s.spec.weight_a = std::move(wa);
    s.spec.weight_b = std::move(wb);
    s.spec.leader_input = std::move(inputs.leader_input);
    s.spec.disturbance = std::move(inputs.disturbance);
    s.spec.schedule = std::move(schedule);
    s.spec.validate();
    if (s.x0.rows() != r.n || s.x0.cols() != r.d || s.y0.rows() != r.k || s.y0.cols() != r.d) {
        throw invalid_input("scenario: initial state shape does not match (n, k, d)");
    }

    const auto &sched = s.spec.schedule;
    s.name = std::string(to_string(r.kind)) + "_n" + std::to_string(r.n) + "_k" + std::to_string(r.k) + "_d"
             + std::to_string(r.d) + "_s" + std::to_string(r.seed);
    switch (r.kind) {
        case ScenarioClass::ujlc:
            if (!classify_ujlc(sched, r.T)) {
                throw invalid_input("scenario: schedule is not UJLC with T = " + std::to_string(r.T));
            }
            s.expected = Expected::siss;
            break;
        case ScenarioClass::counterexample:
            if (classify_jlc(sched)) {
                throw invalid_input("scenario: counterexample schedule is JLC");
            }
            s.expected = Expected::divergence;
            break;
        case ScenarioClass::jlc_bidirectional:
        case ScenarioClass::jlc_acyclic: {
            const bool shape_ok = r.kind == ScenarioClass::jlc_bidirectional ? is_schedule_bidirectional(sched)
                                                                              : is_union_acyclic(sched);
            if (!shape_ok) {
                throw invalid_input("scenario: follower graphs do not have the claimed structure");
            }
            if (classify_jlc(sched) == r.break_jlc) {
                throw invalid_input("scenario: JLC classification does not match break_jlc");
            }
            s.expected = r.break_jlc ? Expected::no_tracking : Expected::siiss;
            if (r.break_jlc) {
                s.name += "_broken";
            }
            break;
        }
    }
    return s;
}

// A random leader-rooted spanning arborescence shown one arc at a time, each
// for T / n. Every window of length T covers n consecutive pieces and thus
// the whole tree. The last piece shows the full tree.
inline Scenario make_ujlc(Recipe r)
{
    r.kind = ScenarioClass::ujlc;
    detail::check_recipe(r);
    const double piece = r.T / r.n;
    if (piece < r.tau_D) {
        throw invalid_input("make_ujlc: T / n = " + std::to_string(piece) + " is shorter than tau_D");
    }
    std::mt19937_64 rng(r.seed);
    std::vector<int> order(static_cast<std::size_t>(r.n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Arc> tree;
    for (int j = 0; j < r.n; ++j) {
        const int pick = detail::uniform_int(rng, 0, r.k + j - 1);
        const AgentId parent = pick < r.k ? AgentId::leader(pick + 1)
                                          : AgentId::follower(order[static_cast<std::size_t>(pick - r.k)]);
        tree.push_back({parent, AgentId::follower(order[static_cast<std::size_t>(j)])});
    }

    const double T_star = r.n * (r.T + 2 * r.tau_D);
    const double horizon = r.horizon > 0 ? r.horizon : 3 * T_star;
    const auto pieces_needed = static_cast<std::size_t>(std::ceil(horizon / piece - 1e-9));
    std::vector<SwitchingSchedule::Piece> pieces;
    for (std::size_t m = 0; m < pieces_needed; ++m) {
        Digraph g(r.n, r.k);
        if (m + 1 == pieces_needed) {
            // The closing piece carries the whole tree so the tail unions stay L-connected.
            for (const auto &a : tree) {
                g.add_arc(a);
            }
        } else {
            g.add_arc(tree[m % tree.size()]);
        }
        pieces.push_back({static_cast<double>(m) * piece, std::move(g)});
    }
    auto [x0, y0] = detail::spread_initial_states(r, rng);
    return assemble_scenario(r, SwitchingSchedule(std::move(pieces), horizon, r.tau_D), std::move(x0),
                             std::move(y0));
}

// Alternates a tau_D-long piece where every leader feeds every follower with
// empty pieces of the given lengths; the horizon ends with the last empty
// piece. Followers start at the origin, leaders at the all-ones vector, and
// every leader moves with velocity (1, ..., 1).
inline Scenario make_counterexample_nonjlc(Recipe r)
{
    r.kind = ScenarioClass::counterexample;
    r.input = InputShape::constant_ones;
    detail::check_recipe(r);
    if (r.disconnected_windows.empty()) {
        throw invalid_input("make_counterexample_nonjlc: no disconnected windows");
    }
    for (std::size_t i = 0; i < r.disconnected_windows.size(); ++i) {
        if (!(r.disconnected_windows[i] >= r.tau_D)) {
            throw invalid_input("make_counterexample_nonjlc: windows must be at least tau_D long");
        }
        if (i > 0 && !(r.disconnected_windows[i] > r.disconnected_windows[i - 1])) {
            throw invalid_input("make_counterexample_nonjlc: window lengths must strictly increase");
        }
    }
    Digraph connected(r.n, r.k);
    for (int i = 1; i <= r.n; ++i) {
        for (int j = 1; j <= r.k; ++j) {
            connected.add_arc({AgentId::leader(j), AgentId::follower(i)});
        }
    }
    std::vector<SwitchingSchedule::Piece> pieces;
    double t = 0;
    for (double len : r.disconnected_windows) {
        pieces.push_back({t, connected});
        t += r.tau_D;
        pieces.push_back({t, Digraph(r.n, r.k)});
        t += len;
    }
    r.horizon = t;
    return assemble_scenario(r, SwitchingSchedule(std::move(pieces), t, r.tau_D), StateMatrix::Zero(r.n, r.d),
                             StateMatrix::Ones(r.k, r.d));
}

// Lengths 2^1, ..., 2^count.
inline std::vector<double> doubling_windows(int count)
{
    std::vector<double> out;
    for (int c = 1; c <= count; ++c) {
        out.push_back(std::ldexp(1.0, c));
    }
    return out;
}

// Disconnected start and end times of each empty window of a counterexample schedule.
inline std::vector<std::pair<double, double>> disconnected_intervals(const Scenario &s)
{
    std::vector<std::pair<double, double>> out;
    const auto &sched = s.spec.schedule;
    for (std::size_t p = 0; p < sched.pieces().size(); ++p) {
        if (!is_l_connected(sched.pieces()[p].graph)) {
            out.emplace_back(sched.pieces()[p].start, sched.piece_end(p));
        }
    }
    return out;
}

namespace detail
{

// Connectivity windows of length 2 starting at 4, 8, 16, 32, 64; the horizon
// ends with the last window. Between windows only follower-follower arcs are
// present, so the schedule is JLC but not UJLC for any T shorter than the
// longest gap.
struct JlcLayout {
    Digraph background;
    Digraph opening;
    Digraph closing;
};

inline Scenario build_jlc(const Recipe &r, const JlcLayout &layout, std::mt19937_64 &rng)
{
    constexpr double window = 2;
    std::vector<SwitchingSchedule::Piece> pieces{{0.0, layout.background}};
    double end = 0;
    for (int m = 2; m <= 6; ++m) {
        const double start = std::ldexp(1.0, m);
        if (r.horizon > 0 && start + window > r.horizon + 1e-12) {
            break;
        }
        pieces.push_back({start, layout.opening});
        pieces.push_back({start + window / 2, layout.closing});
        pieces.push_back({start + window, layout.background});
        end = start + window;
    }
    if (end == 0) {
        throw invalid_input("jlc scenario: horizon too short for a connectivity window");
    }
    pieces.pop_back();
    if (r.tau_D > window / 2) {
        throw invalid_input("jlc scenario: tau_D must be at most 1");
    }
    auto [x0, y0] = spread_initial_states(r, rng);
    return assemble_scenario(r, SwitchingSchedule(std::move(pieces), end, r.tau_D), std::move(x0), std::move(y0));
}

inline void drop_follower(Digraph &g, int isolated)
{
    Digraph kept(g.followers(), g.leaders());
    for (const auto &a : g.arcs()) {
        const bool touches = (a.from.is_leader() ? false : a.from.index == isolated) || a.to.index == isolated;
        if (!touches) {
            kept.add_arc(a);
        }
    }
    g = std::move(kept);
}

} // namespace detail

// Follower arcs always come in pairs. The background links followers along a
// random path; the opening half of each window adds a leader arc into half of
// the followers, the closing half feeds every follower from every leader.
inline Scenario make_jlc_bidirectional(Recipe r)
{
    r.kind = ScenarioClass::jlc_bidirectional;
    detail::check_recipe(r);
    std::mt19937_64 rng(r.seed);
    std::vector<int> order(static_cast<std::size_t>(r.n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);

    detail::JlcLayout layout{Digraph(r.n, r.k), Digraph(r.n, r.k), Digraph(r.n, r.k)};
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
        const auto a = AgentId::follower(order[j]);
        const auto b = AgentId::follower(order[j + 1]);
        for (auto *g : {&layout.background, &layout.opening, &layout.closing}) {
            g->add_arc({a, b});
            g->add_arc({b, a});
        }
    }
    for (std::size_t j = 0; j < order.size(); j += 2) {
        layout.opening.add_arc({AgentId::leader(detail::uniform_int(rng, 1, r.k)), AgentId::follower(order[j])});
    }
    for (int i = 1; i <= r.n; ++i) {
        for (int l = 1; l <= r.k; ++l) {
            layout.closing.add_arc({AgentId::leader(l), AgentId::follower(i)});
        }
    }
    if (r.break_jlc) {
        for (auto *g : {&layout.background, &layout.opening, &layout.closing}) {
            detail::drop_follower(*g, r.n);
        }
    }
    return detail::build_jlc(r, layout, rng);
}

// Follower arcs only run forward along a random order, so the union over the
// whole run is acyclic. The opening half feeds the first follower of the
// order, the closing half feeds every follower.
inline Scenario make_jlc_acyclic(Recipe r)
{
    r.kind = ScenarioClass::jlc_acyclic;
    detail::check_recipe(r);
    std::mt19937_64 rng(r.seed);
    std::vector<int> order(static_cast<std::size_t>(r.n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);

    detail::JlcLayout layout{Digraph(r.n, r.k), Digraph(r.n, r.k), Digraph(r.n, r.k)};
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
        const Arc forward{AgentId::follower(order[j]), AgentId::follower(order[j + 1])};
        layout.background.add_arc(forward);
        layout.opening.add_arc(forward);
        layout.closing.add_arc(forward);
    }
    layout.opening.add_arc({AgentId::leader(detail::uniform_int(rng, 1, r.k)), AgentId::follower(order[0])});
    for (int i = 1; i <= r.n; ++i) {
        for (int l = 1; l <= r.k; ++l) {
            layout.closing.add_arc({AgentId::leader(l), AgentId::follower(i)});
        }
    }
    if (r.break_jlc) {
        for (auto *g : {&layout.background, &layout.opening, &layout.closing}) {
            detail::drop_follower(*g, r.n);
        }
    }
    return detail::build_jlc(r, layout, rng);
}

inline Scenario make_scenario(const Recipe &r)
{
    switch (r.kind) {
        case ScenarioClass::ujlc:
            return make_ujlc(r);
        case ScenarioClass::counterexample:
            return make_counterexample_nonjlc(r);
        case ScenarioClass::jlc_bidirectional:
            return make_jlc_bidirectional(r);
        case ScenarioClass::jlc_acyclic:
            return make_jlc_acyclic(r);
    }
    throw invalid_input("make_scenario: unknown class");
}

// Longest stretch between consecutive switching instants over which the
// union graph is not L-connected.
inline double longest_disconnected_run(const SwitchingSchedule &s)
{
    double best = 0;
    const auto &pieces = s.pieces();
    for (std::size_t a = 0; a < pieces.size(); ++a) {
        Digraph acc(s.followers(), s.leaders());
        for (std::size_t b = a; b < pieces.size(); ++b) {
            acc = acc.united(pieces[b].graph);
            if (is_l_connected(acc)) {
                break;
            }
            best = std::max(best, s.piece_end(b) - pieces[a].start);
        }
    }
    return best;
}

} // namespace hullswarm
