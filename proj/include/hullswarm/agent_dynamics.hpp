#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "hull_geometry.hpp"
#include "switching_topology.hpp"

namespace hullswarm
{

// a_lo <= a_ij <= a_hi and b_ij >= b_lo for every evaluation.
struct WeightBounds {
    double a_lo = 1;
    double a_hi = 1;
    double b_lo = 1;

    void validate() const
    {
        if (!(a_lo > 0 && a_lo <= a_hi)) {
            throw invalid_input("WeightBounds: need 0 < a_lo <= a_hi");
        }
        if (!(b_lo > 0)) {
            throw invalid_input("WeightBounds: need b_lo > 0");
        }
    }

    bool operator==(const WeightBounds &) const = default;
};

// Weight of arc (j, i) into follower i; 1-based indices. The same signature
// serves follower neighbors (a_ij) and leaders (b_ij).
using WeightFn = std::function<double(int i, int j, const StateMatrix &x, const StateMatrix &y, double t)>;
// Velocity u_i(y, t) of leader i.
using LeaderInputFn = std::function<Point(int i, const StateMatrix &y, double t)>;
// Disturbance w_i(t) acting on follower i.
using DisturbanceFn = std::function<Point(int i, double t)>;

struct SystemSpec {
    int n = 0;
    int k = 0;
    int d = 0;
    WeightBounds bounds;
    WeightFn weight_a;
    WeightFn weight_b;
    LeaderInputFn leader_input;
    DisturbanceFn disturbance;
    SwitchingSchedule schedule;

    void validate() const
    {
        if (n < 1 || k < 1 || d < 1) {
            throw invalid_input("SystemSpec: n, k and d must be positive");
        }
        bounds.validate();
        if (!weight_a || !weight_b || !leader_input || !disturbance) {
            throw invalid_input("SystemSpec: weight, input and disturbance functions must all be set");
        }
        if (schedule.followers() != n || schedule.leaders() != k) {
            throw invalid_input("SystemSpec: schedule node counts do not match (n, k)");
        }
    }
};

struct StateDerivative {
    StateMatrix dx;
    StateMatrix dy;
};

namespace detail
{

inline void check_states(const SystemSpec &spec, const StateMatrix &x, const StateMatrix &y)
{
    if (x.rows() != spec.n || x.cols() != spec.d) {
        throw invalid_input("follower state must be n x d");
    }
    if (y.rows() != spec.k || y.cols() != spec.d) {
        throw invalid_input("leader state must be k x d");
    }
}

inline std::string arc_label(const char *kind, int i, int j, double t)
{
    return std::string(kind) + " weight on arc (" + std::to_string(j) + ", " + std::to_string(i) + ") at t = "
           + std::to_string(t);
}

} // namespace detail

// Right-hand side of the leader/follower model with the neighbor sets read from g.
inline StateDerivative derivative(const SystemSpec &spec, const StateMatrix &x, const StateMatrix &y, double t,
                                  const Digraph &g)
{
    detail::check_states(spec, x, y);
    StateDerivative out{StateMatrix::Zero(spec.n, spec.d), StateMatrix::Zero(spec.k, spec.d)};

    for (int i = 1; i <= spec.k; ++i) {
        const Point u = spec.leader_input(i, y, t);
        if (u.size() != spec.d) {
            throw invalid_input("leader input has wrong dimension");
        }
        out.dy.row(i - 1) = u.transpose();
    }

    for (int i = 1; i <= spec.n; ++i) {
        auto row = out.dx.row(i - 1);
        for (int j : g.neighbors(i)) {
            const double a = spec.weight_a(i, j, x, y, t);
            if (!(a >= spec.bounds.a_lo && a <= spec.bounds.a_hi)) {
                throw bound_violation(detail::arc_label("follower", i, j, t) + " is " + std::to_string(a)
                                      + ", outside [a_lo, a_hi]");
            }
            row += a * (x.row(j - 1) - x.row(i - 1));
        }
        for (int j : g.leaders_of(i)) {
            const double b = spec.weight_b(i, j, x, y, t);
            if (!(b >= spec.bounds.b_lo) || !std::isfinite(b)) {
                throw bound_violation(detail::arc_label("leader", i, j, t) + " is " + std::to_string(b)
                                      + ", below b_lo");
            }
            row += b * (y.row(j - 1) - x.row(i - 1));
        }
        const Point w = spec.disturbance(i, t);
        if (w.size() != spec.d) {
            throw invalid_input("disturbance has wrong dimension");
        }
        row += w.transpose();
    }
    return out;
}

inline StateDerivative derivative(const SystemSpec &spec, const StateMatrix &x, const StateMatrix &y, double t)
{
    if (!(t >= 0 && t <= spec.schedule.horizon())) {
        throw invalid_input("derivative: time outside the schedule horizon");
    }
    return derivative(spec, x, y, t, spec.schedule.graph_at(t));
}

struct Trajectory {
    std::vector<double> times;
    std::vector<StateMatrix> x;
    std::vector<StateMatrix> y;
    double dt = 0;

    std::size_t size() const noexcept
    {
        return times.size();
    }
};

// Default step resolving every dwell interval with at least 20 steps.
inline double default_step(double dwell)
{
    return std::min(dwell / 20, 1e-2);
}

namespace detail
{

inline void rk4_substep(const SystemSpec &spec, const Digraph &g, StateMatrix &x, StateMatrix &y, double t, double h)
{
    const auto k1 = derivative(spec, x, y, t, g);
    const auto k2 = derivative(spec, x + 0.5 * h * k1.dx, y + 0.5 * h * k1.dy, t + 0.5 * h, g);
    const auto k3 = derivative(spec, x + 0.5 * h * k2.dx, y + 0.5 * h * k2.dy, t + 0.5 * h, g);
    const auto k4 = derivative(spec, x + h * k3.dx, y + h * k3.dy, t + h, g);
    x += (h / 6) * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    y += (h / 6) * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
}

} // namespace detail

// Fixed-step RK4 sampled at t = m * dt. Steps that straddle a switching
// instant are split there, so every substep sees a single graph.
inline Trajectory simulate(const SystemSpec &spec, const StateMatrix &x0, const StateMatrix &y0, double dt,
                           double t_end)
{
    spec.validate();
    detail::check_states(spec, x0, y0);
    if (!(dt > 0)) {
        throw invalid_input("simulate: dt must be positive");
    }
    if (!(t_end > 0 && t_end <= spec.schedule.horizon() * (1 + 1e-12))) {
        throw invalid_input("simulate: t_end must lie in (0, horizon]");
    }
    if (!x0.allFinite() || !y0.allFinite()) {
        throw invalid_input("simulate: non-finite initial state");
    }

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    Trajectory traj;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.x.reserve(steps + 1);
    traj.y.reserve(steps + 1);
    traj.times.push_back(0);
    traj.x.push_back(x0);
    traj.y.push_back(y0);

    StateMatrix x = x0;
    StateMatrix y = y0;
    const auto &schedule = spec.schedule;
    for (std::size_t m = 0; m < steps; ++m) {
        const double t0 = static_cast<double>(m) * dt;
        const double t1 = m + 1 == steps ? t_end : static_cast<double>(m + 1) * dt;
        const double snap = 1e-9 * std::max(1.0, std::abs(t1));

        std::vector<double> cuts{t0};
        for (double s : schedule.switches_between(t0 + snap, t1 - snap)) {
            cuts.push_back(s);
        }
        cuts.push_back(t1);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c];
            const double b = cuts[c + 1];
            // Midpoint lookup: immune to a and b sitting a rounding error off a switch.
            const Digraph &g = schedule.graph_at(0.5 * (a + b));
            detail::rk4_substep(spec, g, x, y, a, b - a);
        }
        if (!x.allFinite() || !y.allFinite()) {
            throw divergence_error("simulate: state became non-finite at t = " + std::to_string(t1), t1);
        }
        traj.times.push_back(t1);
        traj.x.push_back(x);
        traj.y.push_back(y);
    }
    return traj;
}

namespace weights
{

inline WeightFn constant(double value)
{
    return [value](int, int, const StateMatrix &, const StateMatrix &, double) { return value; };
}

// a_ij = a_lo + (a_hi - a_lo) exp(-|x_i - x_j|^2)
inline WeightFn distance_follower(double a_lo, double a_hi)
{
    return [a_lo, a_hi](int i, int j, const StateMatrix &x, const StateMatrix &, double) {
        return a_lo + (a_hi - a_lo) * std::exp(-(x.row(i - 1) - x.row(j - 1)).squaredNorm());
    };
}

// b_ij = b_lo (1 + exp(-|x_i - y_j|^2))
inline WeightFn distance_leader(double b_lo)
{
    return [b_lo](int i, int j, const StateMatrix &x, const StateMatrix &y, double) {
        return b_lo * (1 + std::exp(-(x.row(i - 1) - y.row(j - 1)).squaredNorm()));
    };
}

// Oscillates between lo and hi with angular frequency omega, phase-shifted per arc.
inline WeightFn periodic(double lo, double hi, double omega)
{
    return [lo, hi, omega](int i, int j, const StateMatrix &, const StateMatrix &, double t) {
        return lo + (hi - lo) * 0.5 * (1 + std::sin(omega * t + 0.7 * i + 0.3 * j));
    };
}

} // namespace weights

} // namespace hullswarm
