#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace hullswarm
{

enum class AgentKind { follower, leader };

// A follower v_i or a leader v^_i, with 1-based index as in the usual notation.
struct AgentId {
    AgentKind kind = AgentKind::follower;
    int index = 1;

    static AgentId follower(int i)
    {
        return {AgentKind::follower, i};
    }
    static AgentId leader(int i)
    {
        return {AgentKind::leader, i};
    }

    bool is_leader() const noexcept
    {
        return kind == AgentKind::leader;
    }

    auto operator<=>(const AgentId &) const = default;
};

inline std::string to_string(const AgentId &a)
{
    return (a.is_leader() ? "L" : "F") + std::to_string(a.index);
}

// Arc (from, to): `to` receives information from `from`.
struct Arc {
    AgentId from;
    AgentId to;

    auto operator<=>(const Arc &) const = default;
};

// Digraph over n followers and k leaders. No arc may enter a leader and no
// self-loops are allowed.
class Digraph
{
public:
    Digraph() = default;

    Digraph(int n, int k) : n_(n), k_(k), follower_in_(static_cast<std::size_t>(n)), leader_in_(static_cast<std::size_t>(n))
    {
        if (n < 1 || k < 1) {
            throw invalid_input("Digraph: need at least one follower and one leader");
        }
    }

    Digraph(int n, int k, const std::vector<Arc> &arcs) : Digraph(n, k)
    {
        for (const auto &a : arcs) {
            add_arc(a);
        }
    }

    int followers() const noexcept
    {
        return n_;
    }
    int leaders() const noexcept
    {
        return k_;
    }

    void add_arc(const Arc &a)
    {
        check_agent(a.from);
        check_agent(a.to);
        if (a.to.is_leader()) {
            throw invalid_input("Digraph: arc " + to_string(a.from) + "->" + to_string(a.to) + " enters a leader");
        }
        if (a.from == a.to) {
            throw invalid_input("Digraph: self-loop at " + to_string(a.from));
        }
        if (!arcs_.insert(a).second) {
            return;
        }
        auto &bucket = a.from.is_leader() ? leader_in_ : follower_in_;
        auto &list = bucket[static_cast<std::size_t>(a.to.index - 1)];
        list.insert(std::upper_bound(list.begin(), list.end(), a.from.index), a.from.index);
    }

    void add_arc(AgentId from, AgentId to)
    {
        add_arc(Arc{from, to});
    }

    bool has_arc(const Arc &a) const
    {
        return arcs_.count(a) != 0;
    }

    const std::set<Arc> &arcs() const noexcept
    {
        return arcs_;
    }

    // N_i: follower neighbors of follower i (1-based indices, sorted).
    const std::vector<int> &neighbors(int i) const
    {
        return follower_in_.at(static_cast<std::size_t>(i - 1));
    }
    // L_i: leaders connected to follower i (1-based indices, sorted).
    const std::vector<int> &leaders_of(int i) const
    {
        return leader_in_.at(static_cast<std::size_t>(i - 1));
    }

    Digraph united(const Digraph &other) const
    {
        if (other.n_ != n_ || other.k_ != k_) {
            throw invalid_input("Digraph: union of graphs with different node sets");
        }
        Digraph out = *this;
        for (const auto &a : other.arcs_) {
            out.add_arc(a);
        }
        return out;
    }

    bool operator==(const Digraph &other) const
    {
        return n_ == other.n_ && k_ == other.k_ && arcs_ == other.arcs_;
    }

private:
    void check_agent(const AgentId &a) const
    {
        const int limit = a.is_leader() ? k_ : n_;
        if (a.index < 1 || a.index > limit) {
            throw invalid_input("Digraph: agent " + to_string(a) + " out of range");
        }
    }

    int n_ = 0;
    int k_ = 0;
    std::set<Arc> arcs_;
    std::vector<std::vector<int>> follower_in_;
    std::vector<std::vector<int>> leader_in_;
};

// Followers reachable from some leader, as a mask indexed 0..n-1.
inline std::vector<bool> leader_reachable(const Digraph &g)
{
    const auto n = static_cast<std::size_t>(g.followers());
    std::vector<std::vector<int>> out(n);
    std::vector<bool> seen(n, false);
    std::deque<int> frontier;
    for (const auto &a : g.arcs()) {
        if (a.from.is_leader()) {
            const auto t = static_cast<std::size_t>(a.to.index - 1);
            if (!seen[t]) {
                seen[t] = true;
                frontier.push_back(a.to.index);
            }
        } else {
            out[static_cast<std::size_t>(a.from.index - 1)].push_back(a.to.index);
        }
    }
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop_front();
        for (int w : out[static_cast<std::size_t>(v - 1)]) {
            const auto t = static_cast<std::size_t>(w - 1);
            if (!seen[t]) {
                seen[t] = true;
                frontier.push_back(w);
            }
        }
    }
    return seen;
}

// Every follower is reachable from at least one leader.
inline bool is_l_connected(const Digraph &g)
{
    const auto seen = leader_reachable(g);
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// Every follower-follower arc has its reverse.
inline bool is_follower_bidirectional(const Digraph &g)
{
    for (const auto &a : g.arcs()) {
        if (!a.from.is_leader() && !g.has_arc(Arc{a.to, a.from})) {
            return false;
        }
    }
    return true;
}

inline bool is_follower_acyclic(const Digraph &g)
{
    const auto n = static_cast<std::size_t>(g.followers());
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> out(n);
    for (const auto &a : g.arcs()) {
        if (!a.from.is_leader()) {
            out[static_cast<std::size_t>(a.from.index - 1)].push_back(a.to.index);
            ++indegree[static_cast<std::size_t>(a.to.index - 1)];
        }
    }
    std::deque<int> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) {
            ready.push_back(static_cast<int>(i) + 1);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop_front();
        ++visited;
        for (int w : out[static_cast<std::size_t>(v - 1)]) {
            if (--indegree[static_cast<std::size_t>(w - 1)] == 0) {
                ready.push_back(w);
            }
        }
    }
    return visited == n;
}

// Layers V_1, ..., V_k0 of the follower set such that every arc entering
// layer j comes from a leader or from an earlier layer. Requires an acyclic
// follower subgraph and an L-connected graph. Layers are sorted by index.
inline std::vector<std::vector<int>> acyclic_partition(const Digraph &g)
{
    if (!is_follower_acyclic(g)) {
        throw invalid_input("acyclic_partition: follower subgraph has a cycle");
    }
    if (!is_l_connected(g)) {
        throw invalid_input("acyclic_partition: graph is not L-connected");
    }
    const auto n = static_cast<std::size_t>(g.followers());
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> out(n);
    for (const auto &a : g.arcs()) {
        if (!a.from.is_leader()) {
            out[static_cast<std::size_t>(a.from.index - 1)].push_back(a.to.index);
            ++indegree[static_cast<std::size_t>(a.to.index - 1)];
        }
    }
    std::vector<std::vector<int>> layers;
    std::vector<int> layer;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) {
            layer.push_back(static_cast<int>(i) + 1);
        }
    }
    while (!layer.empty()) {
        std::vector<int> next;
        for (int v : layer) {
            for (int w : out[static_cast<std::size_t>(v - 1)]) {
                if (--indegree[static_cast<std::size_t>(w - 1)] == 0) {
                    next.push_back(w);
                }
            }
        }
        std::sort(next.begin(), next.end());
        layers.push_back(std::move(layer));
        layer = std::move(next);
    }
    return layers;
}

// Piecewise-constant digraph signal sigma(t) on [0, horizon).
class SwitchingSchedule
{
public:
    struct Piece {
        double start = 0;
        Digraph graph;
    };

    SwitchingSchedule() = default;

    SwitchingSchedule(std::vector<Piece> pieces, double horizon, double dwell)
        : pieces_(std::move(pieces)), horizon_(horizon), dwell_(dwell)
    {
        if (pieces_.empty()) {
            throw invalid_input("SwitchingSchedule: no pieces");
        }
        if (!(dwell_ > 0)) {
            throw invalid_input("SwitchingSchedule: dwell time must be positive");
        }
        if (pieces_.front().start != 0) {
            throw invalid_input("SwitchingSchedule: first piece must start at t = 0");
        }
        const int n = pieces_.front().graph.followers();
        const int k = pieces_.front().graph.leaders();
        for (std::size_t p = 0; p < pieces_.size(); ++p) {
            const auto &g = pieces_[p].graph;
            if (g.followers() != n || g.leaders() != k) {
                throw invalid_input("SwitchingSchedule: pieces disagree on (n, k)");
            }
            if (p > 0 && pieces_[p].start - pieces_[p - 1].start < dwell_ * (1 - 1e-12)) {
                throw invalid_input("SwitchingSchedule: switch at t = " + std::to_string(pieces_[p].start)
                                    + " violates the dwell time");
            }
        }
        if (!(horizon_ > pieces_.back().start)) {
            throw invalid_input("SwitchingSchedule: horizon must exceed the last switching instant");
        }
    }

    const std::vector<Piece> &pieces() const noexcept
    {
        return pieces_;
    }
    double horizon() const noexcept
    {
        return horizon_;
    }
    double dwell() const noexcept
    {
        return dwell_;
    }
    int followers() const noexcept
    {
        return pieces_.front().graph.followers();
    }
    int leaders() const noexcept
    {
        return pieces_.front().graph.leaders();
    }

    double piece_end(std::size_t p) const
    {
        return p + 1 < pieces_.size() ? pieces_[p + 1].start : horizon_;
    }

    // Index of the piece active at time t (right-continuous).
    std::size_t piece_index(double t) const
    {
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                                   [](double v, const Piece &p) { return v < p.start; });
        if (it == pieces_.begin()) {
            throw invalid_input("SwitchingSchedule: time " + std::to_string(t) + " before the schedule start");
        }
        return static_cast<std::size_t>(std::distance(pieces_.begin(), it) - 1);
    }

    const Digraph &graph_at(double t) const
    {
        return pieces_[piece_index(t)].graph;
    }

    // Switching instants strictly inside (t1, t2).
    std::vector<double> switches_between(double t1, double t2) const
    {
        std::vector<double> out;
        for (const auto &p : pieces_) {
            if (p.start > t1 && p.start < t2) {
                out.push_back(p.start);
            }
        }
        return out;
    }

    bool operator==(const SwitchingSchedule &o) const
    {
        if (horizon_ != o.horizon_ || dwell_ != o.dwell_ || pieces_.size() != o.pieces_.size()) {
            return false;
        }
        for (std::size_t p = 0; p < pieces_.size(); ++p) {
            if (pieces_[p].start != o.pieces_[p].start || !(pieces_[p].graph == o.pieces_[p].graph)) {
                return false;
            }
        }
        return true;
    }

private:
    std::vector<Piece> pieces_;
    double horizon_ = 0;
    double dwell_ = 0;
};

// Union of the graphs active anywhere in [t1, t2).
inline Digraph union_graph(const SwitchingSchedule &s, double t1, double t2)
{
    if (!(t1 >= 0 && t1 < t2 && t2 <= s.horizon())) {
        throw invalid_input("union_graph: interval [" + std::to_string(t1) + ", " + std::to_string(t2)
                            + ") outside [0, horizon]");
    }
    Digraph out(s.followers(), s.leaders());
    const auto &pieces = s.pieces();
    for (std::size_t p = s.piece_index(t1); p < pieces.size() && pieces[p].start < t2; ++p) {
        for (const auto &a : pieces[p].graph.arcs()) {
            out.add_arc(a);
        }
    }
    return out;
}

// Every window [t, t + T) that fits in the horizon has an L-connected union.
// Unions only grow when a switch enters the window, so windows starting at
// switching instants are the worst case and are the only ones checked.
inline bool classify_ujlc(const SwitchingSchedule &s, double T)
{
    if (!(T > 0)) {
        throw invalid_input("classify_ujlc: window length must be positive");
    }
    if (T >= s.horizon()) {
        throw invalid_input("classify_ujlc: window length must be shorter than the horizon");
    }
    for (const auto &p : s.pieces()) {
        if (p.start + T > s.horizon()) {
            break;
        }
        if (!is_l_connected(union_graph(s, p.start, p.start + T))) {
            return false;
        }
    }
    return true;
}

// Finite-horizon stand-in for joint L-connectivity: the union from every
// switching instant to the end of the horizon is L-connected.
inline bool classify_jlc(const SwitchingSchedule &s)
{
    for (const auto &p : s.pieces()) {
        if (!is_l_connected(union_graph(s, p.start, s.horizon()))) {
            return false;
        }
    }
    return true;
}

// Smallest window length among the gaps between switching instants for
// which classify_ujlc holds, if any does.
inline std::optional<double> find_ujlc_window(const SwitchingSchedule &s)
{
    std::vector<double> candidates;
    const auto &pieces = s.pieces();
    for (std::size_t a = 0; a < pieces.size(); ++a) {
        for (std::size_t b = a; b < pieces.size(); ++b) {
            const double len = s.piece_end(b) - pieces[a].start;
            if (len < s.horizon()) {
                candidates.push_back(len);
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    // Monotone in T, so bisect over the sorted candidates.
    std::size_t lo = 0;
    std::size_t hi = candidates.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (classify_ujlc(s, candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if (lo == candidates.size()) {
        return std::nullopt;
    }
    return candidates[lo];
}

inline bool is_schedule_bidirectional(const SwitchingSchedule &s)
{
    return std::all_of(s.pieces().begin(), s.pieces().end(),
                       [](const SwitchingSchedule::Piece &p) { return is_follower_bidirectional(p.graph); });
}

inline bool is_union_acyclic(const SwitchingSchedule &s)
{
    return is_follower_acyclic(union_graph(s, 0, s.horizon()));
}

struct ConnectivityReport {
    std::vector<bool> l_connected_per_piece;
    bool is_jlc_on_horizon = false;
    std::optional<double> ujlc_witness_T;
    bool is_bidirectional = false;
    bool is_union_acyclic = false;
};

inline ConnectivityReport connectivity_report(const SwitchingSchedule &s)
{
    ConnectivityReport r;
    for (const auto &p : s.pieces()) {
        r.l_connected_per_piece.push_back(is_l_connected(p.graph));
    }
    r.is_jlc_on_horizon = classify_jlc(s);
    if (r.is_jlc_on_horizon) {
        r.ujlc_witness_T = find_ujlc_window(s);
    }
    r.is_bidirectional = is_schedule_bidirectional(s);
    r.is_union_acyclic = is_union_acyclic(s);
    return r;
}

// A leader-to-follower path whose every arc stays present for a contiguous
// stretch of at least the dwell time inside the window.
struct WindowPath {
    std::vector<AgentId> nodes;
    // [begin, end) of the persistent stretch used for each arc, aligned with nodes[1..].
    std::vector<std::pair<double, double>> arc_intervals;
};

// For each follower, a path from a leader in G([t, t + T + 2 tau_D)) built only
// from arcs that persist for at least tau_D within that window.
inline std::map<int, WindowPath> window_paths(const SwitchingSchedule &s, double t, double T)
{
    const double tau = s.dwell();
    const double end = t + T + 2 * tau;
    if (!(t >= 0 && T > 0)) {
        throw invalid_input("window_paths: need t >= 0 and T > 0");
    }
    if (end > s.horizon()) {
        throw invalid_input("window_paths: window exceeds the horizon");
    }

    // Longest contiguous presence of each arc inside [t, end).
    std::map<Arc, std::pair<double, double>> persistent;
    std::map<Arc, double> run_start;
    const auto &pieces = s.pieces();
    const std::size_t first = s.piece_index(t);
    std::set<Arc> previous;
    auto close_run = [&](const Arc &a, double stop) {
        const double begin = run_start.at(a);
        auto it = persistent.find(a);
        if (stop - begin >= tau && (it == persistent.end() || stop - begin > it->second.second - it->second.first)) {
            persistent[a] = {begin, stop};
        }
        run_start.erase(a);
    };
    for (std::size_t p = first; p < pieces.size() && pieces[p].start < end; ++p) {
        const double lo = std::max(pieces[p].start, t);
        const auto &arcs = pieces[p].graph.arcs();
        for (const auto &a : previous) {
            if (!arcs.count(a)) {
                close_run(a, lo);
            }
        }
        for (const auto &a : arcs) {
            if (!run_start.count(a)) {
                run_start[a] = lo;
            }
        }
        previous = arcs;
    }
    for (const auto &a : previous) {
        close_run(a, end);
    }

    const auto n = static_cast<std::size_t>(s.followers());
    std::vector<std::optional<Arc>> via(n);
    std::deque<int> frontier;
    for (const auto &[a, _] : persistent) {
        if (a.from.is_leader()) {
            const auto i = static_cast<std::size_t>(a.to.index - 1);
            if (!via[i]) {
                via[i] = a;
                frontier.push_back(a.to.index);
            }
        }
    }
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop_front();
        for (const auto &[a, _] : persistent) {
            if (!a.from.is_leader() && a.from.index == v) {
                const auto i = static_cast<std::size_t>(a.to.index - 1);
                if (!via[i]) {
                    via[i] = a;
                    frontier.push_back(a.to.index);
                }
            }
        }
    }

    std::map<int, WindowPath> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!via[i]) {
            throw certificate_failure("window_paths: follower F" + std::to_string(i + 1)
                                      + " has no persistent leader path in the window");
        }
        WindowPath path;
        AgentId cur = AgentId::follower(static_cast<int>(i) + 1);
        path.nodes.push_back(cur);
        while (!cur.is_leader()) {
            const Arc a = *via[static_cast<std::size_t>(cur.index - 1)];
            path.nodes.push_back(a.from);
            path.arc_intervals.push_back(persistent.at(a));
            cur = a.from;
        }
        std::reverse(path.nodes.begin(), path.nodes.end());
        std::reverse(path.arc_intervals.begin(), path.arc_intervals.end());
        out.emplace(static_cast<int>(i) + 1, std::move(path));
    }
    return out;
}

// Time marks T_{1_1} < T_{1_2} < ... splitting [0, horizon) into consecutive
// stretches each of whose unions is L-connected. Marks sit on switching
// instants so every arc of a stretch persists for at least the dwell time.
// Every n consecutive stretches form one major interval [T_i, T_{i+1}); the
// returned list holds K*n + 1 marks for K complete major intervals.
inline std::vector<double> jlc_time_marks(const SwitchingSchedule &s)
{
    const int n = s.followers();
    std::vector<double> marks{0.0};
    const auto &pieces = s.pieces();
    std::size_t p = 0;
    while (p < pieces.size()) {
        Digraph acc(s.followers(), s.leaders());
        std::size_t q = p;
        bool connected = false;
        for (; q < pieces.size(); ++q) {
            acc = acc.united(pieces[q].graph);
            if (is_l_connected(acc)) {
                connected = true;
                break;
            }
        }
        if (!connected) {
            break;
        }
        marks.push_back(s.piece_end(q));
        p = q + 1;
    }
    const std::size_t stretches = marks.size() - 1;
    const std::size_t complete = stretches / static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    marks.resize(complete + 1);
    return marks;
}

} // namespace hullswarm
