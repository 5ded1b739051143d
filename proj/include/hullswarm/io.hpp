#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agent_dynamics.hpp"
#include "errors.hpp"
#include "rate_certificates.hpp"
#include "scenario_library.hpp"
#include "switching_topology.hpp"
#include "trajectory_analysis.hpp"

namespace hullswarm::io
{

using json = nlohmann::json;

// Shortest text that parses back to the same double (at most 17 significant digits).
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text)
{
    double v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw invalid_input("cannot parse number '" + std::string(text) + "'");
    }
    return v;
}

inline std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw invalid_input("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw invalid_input("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw invalid_input("write to '" + path + "' failed");
    }
}

namespace detail
{

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

inline std::vector<std::string_view> lines(std::string_view text)
{
    std::vector<std::string_view> out;
    for (auto l : split(text, '\n')) {
        if (!l.empty()) {
            out.push_back(l);
        }
    }
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline Table parse_csv(std::string_view text)
{
    const auto ls = lines(text);
    if (ls.empty()) {
        throw invalid_input("empty CSV");
    }
    Table t;
    for (auto h : split(ls[0], ',')) {
        t.header.emplace_back(h);
    }
    for (std::size_t r = 1; r < ls.size(); ++r) {
        const auto cells = split(ls[r], ',');
        if (cells.size() != t.header.size()) {
            throw invalid_input("CSV row " + std::to_string(r) + " has the wrong number of cells");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) {
            row.push_back(parse_double(c));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace detail

// Header t,x_1_1,...,x_n_d,y_1_1,...,y_k_d; one row per sample.
inline std::string trajectory_csv(const Trajectory &traj)
{
    if (traj.size() == 0) {
        throw invalid_input("trajectory_csv: empty trajectory");
    }
    const auto n = traj.x.front().rows();
    const auto k = traj.y.front().rows();
    const auto d = traj.x.front().cols();
    std::string out = "t";
    for (Eigen::Index i = 1; i <= n; ++i) {
        for (Eigen::Index c = 1; c <= d; ++c) {
            out += ",x_" + std::to_string(i) + "_" + std::to_string(c);
        }
    }
    for (Eigen::Index i = 1; i <= k; ++i) {
        for (Eigen::Index c = 1; c <= d; ++c) {
            out += ",y_" + std::to_string(i) + "_" + std::to_string(c);
        }
    }
    out += '\n';
    for (std::size_t s = 0; s < traj.size(); ++s) {
        out += format_double(traj.times[s]);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < d; ++c) {
                out += ',' + format_double(traj.x[s](i, c));
            }
        }
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index c = 0; c < d; ++c) {
                out += ',' + format_double(traj.y[s](i, c));
            }
        }
        out += '\n';
    }
    return out;
}

inline Trajectory parse_trajectory_csv(std::string_view text)
{
    const auto table = detail::parse_csv(text);
    int n = 0;
    int k = 0;
    int d = 0;
    if (table.header.empty() || table.header[0] != "t") {
        throw invalid_input("trajectory CSV must start with column t");
    }
    for (std::size_t c = 1; c < table.header.size(); ++c) {
        const auto parts = detail::split(table.header[c], '_');
        if (parts.size() != 3 || (parts[0] != "x" && parts[0] != "y")) {
            throw invalid_input("bad trajectory column '" + table.header[c] + "'");
        }
        const int idx = static_cast<int>(parse_double(parts[1]));
        const int coord = static_cast<int>(parse_double(parts[2]));
        (parts[0] == "x" ? n : k) = std::max(parts[0] == "x" ? n : k, idx);
        d = std::max(d, coord);
    }
    if (static_cast<std::size_t>((n + k) * d + 1) != table.header.size()) {
        throw invalid_input("trajectory CSV columns do not form full n x d and k x d blocks");
    }
    Trajectory traj;
    for (const auto &row : table.rows) {
        traj.times.push_back(row[0]);
        StateMatrix x(n, d);
        StateMatrix y(k, d);
        std::size_t c = 1;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) {
                x(i, j) = row[c++];
            }
        }
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < d; ++j) {
                y(i, j) = row[c++];
            }
        }
        traj.x.push_back(std::move(x));
        traj.y.push_back(std::move(y));
    }
    if (traj.size() > 1) {
        traj.dt = traj.times[1] - traj.times[0];
    }
    return traj;
}

// Header t,Psi,dist,r,q,u_norm,w_norm,z_norm,psi_1,...,psi_n.
inline std::string metrics_csv(const MetricSeries &m)
{
    std::string out = "t,Psi,dist,r,q,u_norm,w_norm,z_norm";
    for (int i = 1; i <= m.n; ++i) {
        out += ",psi_" + std::to_string(i);
    }
    out += '\n';
    for (std::size_t s = 0; s < m.size(); ++s) {
        for (double v : {m.times[s], m.Psi[s], m.dist[s], m.r[s], m.q[s], m.u_norm[s], m.w_norm[s], m.z_norm[s]}) {
            out += format_double(v) + ',';
        }
        for (int i = 0; i < m.n; ++i) {
            out += format_double(m.psi[s](i)) + ',';
        }
        out.back() = '\n';
    }
    return out;
}

inline MetricSeries parse_metrics_csv(std::string_view text, int k)
{
    const auto table = detail::parse_csv(text);
    if (table.header.size() < 9 || table.header[0] != "t") {
        throw invalid_input("metrics CSV has too few columns");
    }
    MetricSeries m;
    m.n = static_cast<int>(table.header.size()) - 8;
    m.k = k;
    for (const auto &row : table.rows) {
        m.times.push_back(row[0]);
        m.Psi.push_back(row[1]);
        m.dist.push_back(row[2]);
        m.r.push_back(row[3]);
        m.q.push_back(row[4]);
        m.u_norm.push_back(row[5]);
        m.w_norm.push_back(row[6]);
        m.z_norm.push_back(row[7]);
        Eigen::VectorXd psi(m.n);
        for (int i = 0; i < m.n; ++i) {
            psi(i) = row[8 + static_cast<std::size_t>(i)];
        }
        m.psi.push_back(std::move(psi));
    }
    return m;
}

inline json to_json(const AgentId &a)
{
    return json::array({a.is_leader() ? "leader" : "follower", a.index});
}

inline AgentId agent_from_json(const json &kind, const json &index)
{
    const auto k = kind.get<std::string>();
    if (k != "leader" && k != "follower") {
        throw invalid_input("agent kind must be 'leader' or 'follower'");
    }
    return k == "leader" ? AgentId::leader(index.get<int>()) : AgentId::follower(index.get<int>());
}

// {n, k, horizon, dwell, pieces: [{start_time, arcs: [[from_kind, from_idx, to_kind, to_idx], ...]}, ...]}
inline json to_json(const SwitchingSchedule &s)
{
    json pieces = json::array();
    for (const auto &p : s.pieces()) {
        json arcs = json::array();
        for (const auto &a : p.graph.arcs()) {
            arcs.push_back({a.from.is_leader() ? "leader" : "follower", a.from.index,
                            a.to.is_leader() ? "leader" : "follower", a.to.index});
        }
        pieces.push_back({{"start_time", p.start}, {"arcs", std::move(arcs)}});
    }
    return {{"n", s.followers()}, {"k", s.leaders()}, {"horizon", s.horizon()}, {"dwell", s.dwell()},
            {"pieces", std::move(pieces)}};
}

inline SwitchingSchedule schedule_from_json(const json &j)
{
    try {
        const int n = j.at("n").get<int>();
        const int k = j.at("k").get<int>();
        std::vector<SwitchingSchedule::Piece> pieces;
        for (const auto &p : j.at("pieces")) {
            Digraph g(n, k);
            for (const auto &a : p.at("arcs")) {
                if (!a.is_array() || a.size() != 4) {
                    throw invalid_input("arc entries must be [from_kind, from_idx, to_kind, to_idx]");
                }
                g.add_arc({agent_from_json(a[0], a[1]), agent_from_json(a[2], a[3])});
            }
            pieces.push_back({p.at("start_time").get<double>(), std::move(g)});
        }
        return SwitchingSchedule(std::move(pieces), j.at("horizon").get<double>(), j.at("dwell").get<double>());
    } catch (const json::exception &e) {
        throw invalid_input(std::string("schedule: ") + e.what());
    }
}

inline json to_json(const StateMatrix &m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(i, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline StateMatrix matrix_from_json(const json &j)
{
    if (!j.is_array() || j.empty()) {
        throw invalid_input("state matrix must be a nonempty array of rows");
    }
    const auto cols = j[0].size();
    StateMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != cols) {
            throw invalid_input("state matrix rows differ in length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
        }
    }
    return m;
}

inline json to_json(const Recipe &r)
{
    return {{"class", to_string(r.kind)},
            {"n", r.n},
            {"k", r.k},
            {"d", r.d},
            {"tau_D", r.tau_D},
            {"T", r.T},
            {"seed", r.seed},
            {"a_lo", r.bounds.a_lo},
            {"a_hi", r.bounds.a_hi},
            {"b_lo", r.bounds.b_lo},
            {"weights", to_string(r.weights)},
            {"input", to_string(r.input)},
            {"input_scale", r.input_scale},
            {"disconnected_windows", r.disconnected_windows},
            {"break_jlc", r.break_jlc},
            {"horizon", r.horizon}};
}

// Missing keys keep their defaults, so a config may name only what it changes.
inline Recipe recipe_from_json(const json &j, Recipe r = {})
{
    if (!j.is_object()) {
        throw invalid_input("scenario parameters must be an object");
    }
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "class") {
                r.kind = parse_scenario_class(value.get<std::string>());
            } else if (key == "n") {
                r.n = value.get<int>();
            } else if (key == "k") {
                r.k = value.get<int>();
            } else if (key == "d") {
                r.d = value.get<int>();
            } else if (key == "tau_D") {
                r.tau_D = value.get<double>();
            } else if (key == "T") {
                r.T = value.get<double>();
            } else if (key == "seed") {
                r.seed = value.get<std::uint64_t>();
            } else if (key == "a_lo") {
                r.bounds.a_lo = value.get<double>();
            } else if (key == "a_hi") {
                r.bounds.a_hi = value.get<double>();
            } else if (key == "b_lo") {
                r.bounds.b_lo = value.get<double>();
            } else if (key == "weights") {
                r.weights = parse_weight_kind(value.get<std::string>());
            } else if (key == "input") {
                r.input = parse_input_shape(value.get<std::string>());
            } else if (key == "input_scale") {
                r.input_scale = value.get<double>();
            } else if (key == "disconnected_windows") {
                r.disconnected_windows = value.get<std::vector<double>>();
            } else if (key == "break_jlc") {
                r.break_jlc = value.get<bool>();
            } else if (key == "horizon") {
                r.horizon = value.get<double>();
            } else {
                throw invalid_input("unknown scenario parameter '" + key + "'");
            }
        }
    } catch (const json::exception &e) {
        throw invalid_input(std::string("scenario parameters: ") + e.what());
    }
    return r;
}

inline json to_json(const Scenario &s)
{
    return {{"name", s.name},
            {"expected", to_string(s.expected)},
            {"recipe", to_json(s.recipe)},
            {"schedule", to_json(s.spec.schedule)},
            {"x0", to_json(s.x0)},
            {"y0", to_json(s.y0)}};
}

// Rebuilds weights and inputs from the recipe but takes the schedule and
// initial state from the document, so hand-edited schedules are honored.
inline Scenario scenario_from_json(const json &j)
{
    try {
        const Recipe r = recipe_from_json(j.at("recipe"));
        Scenario s = assemble_scenario(r, schedule_from_json(j.at("schedule")), matrix_from_json(j.at("x0")),
                                       matrix_from_json(j.at("y0")));
        if (j.contains("name")) {
            s.name = j.at("name").get<std::string>();
        }
        return s;
    } catch (const json::exception &e) {
        throw invalid_input(std::string("scenario: ") + e.what());
    }
}

namespace detail
{

inline json chain_json(const std::vector<Contraction> &chain)
{
    json values = json::array();
    for (const auto &c : chain) {
        values.push_back(c.value());
    }
    return values;
}

inline json chain_gaps_json(const std::vector<Contraction> &chain)
{
    json gaps = json::array();
    for (const auto &c : chain) {
        gaps.push_back(c.log_gap());
    }
    return gaps;
}

inline std::vector<Contraction> chain_from_json(const json &gaps)
{
    std::vector<Contraction> out;
    for (const auto &g : gaps) {
        out.push_back(Contraction::from_log_gap(g.get<double>()));
    }
    return out;
}

// JSON has no infinities; they travel as null.
inline json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

} // namespace detail

// The chain values near one round to 1 in double precision; the *_log_gap
// entries carry log(1 - value) exactly and are what the loader reads.
inline json to_json(const CertificateBundle &b)
{
    json j = {{"n", b.n},
              {"a_lo", b.bounds.a_lo},
              {"a_hi", b.bounds.a_hi},
              {"b_lo", b.bounds.b_lo},
              {"tau_D", b.tau_D},
              {"T", b.T},
              {"lambda", b.lambda},
              {"lambda1", b.lambda1},
              {"T0", b.T0},
              {"T_star", b.T_star},
              {"c0", b.c0},
              {"gamma1", b.gamma1},
              {"gamma2", b.gamma2},
              {"eta_chain", detail::chain_json(b.eta_chain)},
              {"eta_chain_log_gap", detail::chain_gaps_json(b.eta_chain)},
              {"eta_star", b.eta_star.value()},
              {"c_chain", detail::chain_json(b.c_chain)},
              {"c_chain_log_gap", detail::chain_gaps_json(b.c_chain)},
              {"c_hat", b.c_hat.value()},
              {"delta_chain", detail::chain_json(b.delta_chain)},
              {"delta_chain_log_gap", detail::chain_gaps_json(b.delta_chain)},
              {"delta_hat", b.delta_hat.value()},
              {"d_chain", detail::chain_json(b.d_chain)},
              {"d_chain_log_gap", detail::chain_gaps_json(b.d_chain)}};
    const auto siss = siss_envelope(b);
    j["siss_gain"] = detail::finite_or_null(siss.gain);
    j["siss_period_gain"] = siss.period_gain;
    j["siiss_gain"] = siiss_envelope_ujlc(b).gain;
    return j;
}

inline CertificateBundle certificate_from_json(const json &j)
{
    try {
        CertificateBundle b;
        b.n = j.at("n").get<int>();
        b.bounds = {j.at("a_lo").get<double>(), j.at("a_hi").get<double>(), j.at("b_lo").get<double>()};
        b.tau_D = j.at("tau_D").get<double>();
        b.T = j.at("T").get<double>();
        b.lambda = j.at("lambda").get<double>();
        b.lambda1 = j.at("lambda1").get<double>();
        b.T0 = j.at("T0").get<double>();
        b.T_star = j.at("T_star").get<double>();
        b.c0 = j.at("c0").get<double>();
        b.gamma1 = j.at("gamma1").get<double>();
        b.gamma2 = j.at("gamma2").get<double>();
        b.eta_chain = detail::chain_from_json(j.at("eta_chain_log_gap"));
        b.c_chain = detail::chain_from_json(j.at("c_chain_log_gap"));
        b.delta_chain = detail::chain_from_json(j.at("delta_chain_log_gap"));
        b.d_chain = detail::chain_from_json(j.at("d_chain_log_gap"));
        if (b.eta_chain.empty() || b.c_chain.empty() || b.delta_chain.empty() || b.d_chain.empty()) {
            throw invalid_input("certificate: empty chain");
        }
        b.eta_star = b.eta_chain.back();
        b.c_hat = b.c_chain.back();
        b.delta_hat = b.delta_chain.back();
        return b;
    } catch (const json::exception &e) {
        throw invalid_input(std::string("certificate: ") + e.what());
    }
}

inline json to_json(const BoundVerdict &v)
{
    return {{"check_name", v.check_name},
            {"holds", v.holds},
            {"max_violation", detail::finite_or_null(v.max_violation)},
            {"first_violation_time", v.first_violation_time ? json(*v.first_violation_time) : json(nullptr)},
            {"tolerance", v.tolerance}};
}

// Reads the summary fields; margin series are not part of the report.
inline BoundVerdict verdict_from_json(const json &j)
{
    try {
        BoundVerdict v;
        v.check_name = j.at("check_name").get<std::string>();
        v.holds = j.at("holds").get<bool>();
        v.max_violation = j.at("max_violation").is_null() ? -std::numeric_limits<double>::infinity()
                                                          : j.at("max_violation").get<double>();
        if (!j.at("first_violation_time").is_null()) {
            v.first_violation_time = j.at("first_violation_time").get<double>();
        }
        v.tolerance = j.at("tolerance").get<double>();
        return v;
    } catch (const json::exception &e) {
        throw invalid_input(std::string("verdict: ") + e.what());
    }
}

inline json parse_json(const std::string &text, const std::string &what)
{
    try {
        return json::parse(text);
    } catch (const json::exception &e) {
        throw invalid_input(what + ": " + e.what());
    }
}

// dist(t), an optional envelope and q(t) on a shared time axis, log10 scale.
inline std::string plot_svg(const MetricSeries &m, const std::vector<double> &envelope)
{
    if (m.size() == 0) {
        throw invalid_input("plot_svg: no samples");
    }
    constexpr double W = 800;
    constexpr double H = 480;
    constexpr double pad = 50;
    static constexpr double floor_value = 1e-8;
    auto lg = [](double v) { return std::log10(std::max(v, floor_value)); };

    double lo = lg(floor_value);
    double hi = lo + 1;
    for (const auto *series : {&m.dist, &m.q, &envelope}) {
        for (double v : *series) {
            if (std::isfinite(v)) {
                hi = std::max(hi, lg(v));
            }
        }
    }
    const double t0 = m.times.front();
    const double t1 = std::max(m.times.back(), t0 + 1e-12);
    auto px = [&](double t) { return pad + (W - 2 * pad) * (t - t0) / (t1 - t0); };
    auto py = [&](double v) { return H - pad - (H - 2 * pad) * (lg(v) - lo) / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << pad << "\" y=\"" << pad - 10 << "\" font-size=\"12\">log10 scale, 1e" << std::lround(lo)
        << " to 1e" << std::lround(hi) << "; t in [" << t0 << ", " << t1 << "]</text>\n";
    auto polyline = [&](const std::vector<double> &values, const char *colour, const char *label, int row) {
        if (values.empty()) {
            return;
        }
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
        for (std::size_t s = 0; s < values.size() && s < m.size(); ++s) {
            if (std::isfinite(values[s])) {
                svg << px(m.times[s]) << ',' << py(values[s]) << ' ';
            }
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << W - pad - 120 << "\" y=\"" << pad + 15 * row << "\" fill=\"" << colour
            << "\" font-size=\"12\">" << label << "</text>\n";
    };
    polyline(m.dist, "blue", "dist", 1);
    polyline(envelope, "red", "envelope", 2);
    polyline(m.q, "green", "q", 3);
    svg << "</svg>\n";
    return svg.str();
}

} // namespace hullswarm::io
