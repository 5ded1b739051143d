#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "agent_dynamics.hpp"
#include "errors.hpp"
#include "hull_geometry.hpp"
#include "rate_certificates.hpp"
#include "switching_topology.hpp"

namespace hullswarm
{

struct MetricSeries {
    std::vector<double> times;
    // Squared distance of every follower to the hull, one vector per sample.
    std::vector<Eigen::VectorXd> psi;
    std::vector<double> Psi;
    std::vector<double> dist;
    // Largest leader speed.
    std::vector<double> r;
    // r plus the largest disturbance magnitude.
    std::vector<double> q;
    // Stacked Euclidean norms of all leader inputs, all disturbances, and of z = (u, w).
    std::vector<double> u_norm;
    std::vector<double> w_norm;
    std::vector<double> z_norm;
    int n = 0;
    int k = 0;

    std::size_t size() const noexcept
    {
        return times.size();
    }
};

inline MetricSeries compute_metrics(const Trajectory &traj, const SystemSpec &spec)
{
    spec.validate();
    MetricSeries m;
    m.n = spec.n;
    m.k = spec.k;
    m.times = traj.times;
    const std::size_t N = traj.size();
    m.psi.reserve(N);
    for (std::size_t s = 0; s < N; ++s) {
        const double t = traj.times[s];
        const LeaderHull hull(traj.y[s]);
        Eigen::VectorXd psi(spec.n);
        for (int i = 0; i < spec.n; ++i) {
            const double di = distance(traj.x[s].row(i).transpose(), hull);
            psi(i) = di * di;
        }
        double r = 0;
        double u_sq = 0;
        for (int i = 1; i <= spec.k; ++i) {
            const double ui = spec.leader_input(i, traj.y[s], t).norm();
            r = std::max(r, ui);
            u_sq += ui * ui;
        }
        double w_max = 0;
        double w_sq = 0;
        for (int i = 1; i <= spec.n; ++i) {
            const double wi = spec.disturbance(i, t).norm();
            w_max = std::max(w_max, wi);
            w_sq += wi * wi;
        }
        const double Psi = psi.maxCoeff();
        m.psi.push_back(psi);
        m.Psi.push_back(Psi);
        m.dist.push_back(std::sqrt(Psi));
        m.r.push_back(r);
        m.q.push_back(r + w_max);
        m.u_norm.push_back(std::sqrt(u_sq));
        m.w_norm.push_back(std::sqrt(w_sq));
        m.z_norm.push_back(std::sqrt(u_sq + w_sq));
    }
    return m;
}

struct BoundVerdict {
    std::string check_name;
    bool holds = true;
    // Largest observed-minus-bound excess; negative when every sample has slack.
    double max_violation = -std::numeric_limits<double>::infinity();
    std::optional<double> first_violation_time;
    // bound - observed at each checked instant.
    std::vector<double> margin_series;
    double tolerance = 0;
};

namespace detail
{

class VerdictBuilder
{
public:
    VerdictBuilder(std::string name, double tolerance)
    {
        v_.check_name = std::move(name);
        v_.tolerance = tolerance;
    }

    // `slack` is added to the bound for this sample only (sample-dependent tolerances).
    void observe(double t, double observed, double bound, double slack = 0)
    {
        const double margin = bound - observed;
        v_.margin_series.push_back(margin);
        const double excess = -margin - slack;
        v_.max_violation = std::max(v_.max_violation, excess);
        if (excess > v_.tolerance && !v_.first_violation_time) {
            v_.first_violation_time = t;
        }
    }

    BoundVerdict finish()
    {
        v_.holds = !(v_.max_violation > v_.tolerance);
        return std::move(v_);
    }

private:
    BoundVerdict v_;
};

} // namespace detail

// Cumulative trapezoid integral, starting at zero.
inline std::vector<double> cumulative_integral(std::span<const double> times, std::span<const double> values)
{
    if (times.size() != values.size()) {
        throw invalid_input("cumulative_integral: size mismatch");
    }
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t s = 1; s < times.size(); ++s) {
        out[s] = out[s - 1] + 0.5 * (times[s] - times[s - 1]) * (values[s] + values[s - 1]);
    }
    return out;
}

// Linear interpolation on a sampled series; exact at sample instants.
inline double sample_at(std::span<const double> times, std::span<const double> values, double t)
{
    if (times.empty() || t < times.front() - 1e-9 || t > times.back() + 1e-9) {
        throw invalid_input("sample_at: time " + std::to_string(t) + " outside the sampled range");
    }
    const double snap = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(times.begin(), times.end(), t - snap);
    const auto s = static_cast<std::size_t>(std::distance(times.begin(), it));
    if (s < times.size() && std::abs(times[s] - t) <= snap) {
        return values[s];
    }
    if (s == 0) {
        return values.front();
    }
    if (s == times.size()) {
        return values.back();
    }
    const double a = (t - times[s - 1]) / (times[s] - times[s - 1]);
    return (1 - a) * values[s - 1] + a * values[s];
}

// q <= |u| + |w| <= sqrt(2) |z| <= sqrt(2) max(sqrt n, sqrt k) q at every sample.
inline BoundVerdict check_g2_sandwich(const MetricSeries &m, int n, int k, double tolerance = 1e-9)
{
    detail::VerdictBuilder b("g2", tolerance);
    const double outer = std::sqrt(2.0) * std::max(std::sqrt(double(n)), std::sqrt(double(k)));
    for (std::size_t s = 0; s < m.size(); ++s) {
        const double t = m.times[s];
        const double sum = m.u_norm[s] + m.w_norm[s];
        const double z2 = std::sqrt(2.0) * m.z_norm[s];
        // The verdict tracks the tightest of the three links.
        const double margin = std::min({sum - m.q[s], z2 - sum, outer * m.q[s] - z2});
        b.observe(t, -margin, 0);
    }
    return b.finish();
}

// Forward differences of dist against the larger endpoint value of q.
// The slack is C h + floor with C = 2 max |q(t + h) - q(t)| / h, which
// covers the variation of q inside each step.
inline BoundVerdict check_dini_bound(const MetricSeries &m, double floor = 1e-7)
{
    if (m.size() < 2) {
        return detail::VerdictBuilder("dini", floor).finish();
    }
    double C = 0;
    for (std::size_t s = 0; s + 1 < m.size(); ++s) {
        const double h = m.times[s + 1] - m.times[s];
        C = std::max(C, 2 * std::abs(m.q[s + 1] - m.q[s]) / h);
    }
    double h_max = 0;
    for (std::size_t s = 0; s + 1 < m.size(); ++s) {
        h_max = std::max(h_max, m.times[s + 1] - m.times[s]);
    }
    detail::VerdictBuilder b("dini", C * h_max + floor);
    for (std::size_t s = 0; s + 1 < m.size(); ++s) {
        const double h = m.times[s + 1] - m.times[s];
        const double rate = (m.dist[s + 1] - m.dist[s]) / h;
        b.observe(m.times[s], rate, std::max(m.q[s], m.q[s + 1]));
    }
    return b.finish();
}

// | |x_i(t)|_{L(y(t))} - |x_i(t)|_{L(y(t0))} | <= int_{t0}^{t} r for every follower.
inline BoundVerdict check_lemma7(const Trajectory &traj, const MetricSeries &m, std::size_t start,
                                 double tolerance = 1e-6)
{
    if (start >= traj.size()) {
        throw invalid_input("check_lemma7: start sample out of range");
    }
    const LeaderHull frozen(traj.y[start]);
    const auto integral = cumulative_integral(m.times, m.r);
    detail::VerdictBuilder b("lemma7", tolerance);
    for (std::size_t s = start; s < traj.size(); ++s) {
        const double bound = integral[s] - integral[start];
        double worst = 0;
        for (Eigen::Index i = 0; i < traj.x[s].rows(); ++i) {
            const double moving = std::sqrt(m.psi[s](i));
            const double fixed = distance(traj.x[s].row(i).transpose(), frozen);
            worst = std::max(worst, std::abs(moving - fixed));
        }
        b.observe(traj.times[s], worst, bound);
    }
    return b.finish();
}

inline BoundVerdict check_lemma7(const Trajectory &traj, const SystemSpec &spec, double t0, double tolerance = 1e-6)
{
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t0 - 1e-9 * std::max(1.0, t0));
    if (it == traj.times.end() || std::abs(*it - t0) > 1e-9 * std::max(1.0, t0)) {
        throw invalid_input("check_lemma7: t0 is not a sample instant");
    }
    const auto m = compute_metrics(traj, spec);
    return check_lemma7(traj, m, static_cast<std::size_t>(std::distance(traj.times.begin(), it)), tolerance);
}

namespace detail
{

inline void require_ujlc(const SwitchingSchedule &s, double T, const char *who)
{
    bool ok = false;
    try {
        ok = classify_ujlc(s, T);
    } catch (const invalid_input &e) {
        throw precondition_error(std::string(who) + ": " + e.what());
    }
    if (!ok) {
        throw precondition_error(std::string(who) + ": schedule is not UJLC with T = " + std::to_string(T));
    }
}

inline void require_connectivity(const SwitchingSchedule &s, const SiissEnvelope &e, const char *who)
{
    switch (e.connectivity) {
        case Connectivity::ujlc:
            require_ujlc(s, e.T, who);
            return;
        case Connectivity::jlc_bidirectional:
            if (!classify_jlc(s) || !is_schedule_bidirectional(s)) {
                throw precondition_error(std::string(who) + ": schedule is not JLC with bidirectional follower graphs");
            }
            return;
        case Connectivity::jlc_acyclic:
            if (!classify_jlc(s) || !is_union_acyclic(s)) {
                throw precondition_error(std::string(who) + ": schedule is not JLC with an acyclic follower union");
            }
            return;
    }
}

inline std::vector<double> running_max(std::span<const double> v)
{
    std::vector<double> out(v.size());
    double acc = 0;
    for (std::size_t s = 0; s < v.size(); ++s) {
        acc = std::max(acc, v[s]);
        out[s] = acc;
    }
    return out;
}

} // namespace detail

// dist(t) <= beta(dist(0), t) + gamma(sup_{[0, t]} |z|). A fixed z_sup replaces
// the running supremum when given.
inline BoundVerdict verify_siss(const MetricSeries &m, const SystemSpec &spec, const CertificateBundle &bundle,
                                std::optional<double> z_sup = {}, double tolerance = 1e-6)
{
    detail::require_ujlc(spec.schedule, bundle.T, "verify_siss");
    const SissEnvelope env = siss_envelope(bundle);
    const auto sup = detail::running_max(m.z_norm);
    detail::VerdictBuilder b("siss", tolerance);
    const double dist0 = m.dist.front();
    for (std::size_t s = 0; s < m.size(); ++s) {
        const double zs = z_sup ? *z_sup : sup[s];
        b.observe(m.times[s], m.dist[s], env.beta(dist0, m.times[s]) + env.gamma(zs));
    }
    return b.finish();
}

// dist(t) <= beta(dist(0), t) + int_0^t gamma(|z|).
inline BoundVerdict verify_siiss(const MetricSeries &m, const SystemSpec &spec, const SiissEnvelope &env,
                                 double tolerance = 1e-6)
{
    detail::require_connectivity(spec.schedule, env, "verify_siiss");
    std::vector<double> gz(m.size());
    for (std::size_t s = 0; s < m.size(); ++s) {
        gz[s] = env.gamma(m.z_norm[s]);
    }
    const auto integral = cumulative_integral(m.times, gz);
    detail::VerdictBuilder b(std::string("siiss_") + to_string(env.connectivity), tolerance);
    const double dist0 = m.dist.front();
    for (std::size_t s = 0; s < m.size(); ++s) {
        b.observe(m.times[s], m.dist[s], env.beta(dist0, m.times[s]) + integral[s]);
    }
    return b.finish();
}

// The discrete recursion of an envelope at its own marks: multiples of the
// period for UJLC, the major marks for the JLC variants.
inline BoundVerdict verify_siiss_marks(const MetricSeries &m, const SystemSpec &spec, const SiissEnvelope &env,
                                       double tolerance = 1e-6)
{
    detail::require_connectivity(spec.schedule, env, "verify_siiss_marks");
    std::vector<double> marks = env.marks;
    if (marks.empty()) {
        for (double t = 0; t <= m.times.back() + 1e-9 * std::max(1.0, t); t += env.period) {
            marks.push_back(t);
        }
    }
    const auto integral = cumulative_integral(m.times, m.z_norm);
    std::vector<double> pieces;
    for (std::size_t i = 0; i + 1 < marks.size() && marks[i + 1] <= m.times.back() + 1e-9; ++i) {
        pieces.push_back(sample_at(m.times, integral, marks[i + 1]) - sample_at(m.times, integral, marks[i]));
    }
    const auto bounds = env.recursion().evaluate(m.dist.front(), pieces);
    detail::VerdictBuilder b(std::string("siiss_marks_") + to_string(env.connectivity), tolerance);
    for (std::size_t K = 1; K <= bounds.size(); ++K) {
        b.observe(marks[K], sample_at(m.times, m.dist, marks[K]), bounds[K - 1]);
    }
    return b.finish();
}

struct WindowContraction {
    BoundVerdict verdict;
    // Largest dist(t + T_star) / dist(t) seen over samples with dist(t) above the tolerance.
    double worst_factor = 0;
};

// dist(t + T_star) <= eta_star dist(t) at every sample with t + T_star inside the run.
inline WindowContraction check_window_contraction(const MetricSeries &m, const SystemSpec &spec,
                                                  const CertificateBundle &bundle, double tolerance = 1e-6)
{
    detail::require_ujlc(spec.schedule, bundle.T, "check_window_contraction");
    WindowContraction out;
    detail::VerdictBuilder b("window_contraction", tolerance);
    const double eta = bundle.eta_star.value();
    for (std::size_t s = 0; s < m.size(); ++s) {
        const double t = m.times[s];
        if (t + bundle.T_star > m.times.back() + 1e-9 * std::max(1.0, t)) {
            break;
        }
        const double later = sample_at(m.times, m.dist, t + bundle.T_star);
        b.observe(t, later, eta * m.dist[s]);
        if (m.dist[s] > tolerance) {
            out.worst_factor = std::max(out.worst_factor, later / m.dist[s]);
        }
    }
    out.verdict = b.finish();
    return out;
}

struct TrackingResult {
    bool achieved = false;
    std::optional<double> entry_time;
};

// Achieved when dist stays below eps from some sample to the end of the run.
inline TrackingResult detect_set_tracking(const MetricSeries &m, double eps)
{
    if (!(eps > 0)) {
        throw invalid_input("detect_set_tracking: eps must be positive");
    }
    TrackingResult r;
    std::size_t entry = m.size();
    for (std::size_t s = m.size(); s-- > 0;) {
        if (!(m.dist[s] < eps)) {
            break;
        }
        entry = s;
    }
    if (entry < m.size()) {
        r.achieved = true;
        r.entry_time = m.times[entry];
    }
    return r;
}

inline BoundVerdict tracking_verdict(const MetricSeries &m, double eps)
{
    detail::VerdictBuilder b("tracking", 0);
    if (!m.dist.empty()) {
        b.observe(m.times.back(), m.dist.back(), eps);
    }
    auto v = b.finish();
    const auto r = detect_set_tracking(m, eps);
    v.holds = r.achieved;
    if (!r.achieved) {
        v.max_violation = std::max(v.max_violation, 0.0);
        v.first_violation_time = m.times.back();
    }
    return v;
}

} // namespace hullswarm
