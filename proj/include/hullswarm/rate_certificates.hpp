#pragma once

#include <cmath>
#include <numbers>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "agent_dynamics.hpp"
#include "errors.hpp"

namespace hullswarm
{

// A factor c in [0, 1] stored as log(1 - c).
//
// The constructive rates stack exponentials, so for a handful of followers
// the factors sit within 1e-20 of one; storing the gap keeps them strictly
// below one and keeps 1 / (1 - c) meaningful.
class Contraction
{
public:
    Contraction() = default;

    static Contraction one()
    {
        return Contraction(-std::numeric_limits<double>::infinity());
    }
    static Contraction from_log_gap(double log_gap)
    {
        if (std::isnan(log_gap) || log_gap > 0) {
            throw invalid_input("Contraction: log gap must be <= 0");
        }
        return Contraction(log_gap);
    }
    static Contraction from_value(double value)
    {
        if (!(value >= 0 && value <= 1)) {
            throw invalid_input("Contraction: value must lie in [0, 1]");
        }
        return Contraction(std::log1p(-value));
    }

    double log_gap() const noexcept
    {
        return log_gap_;
    }
    // 1 - c; underflows to zero once the factor is indistinguishable from one.
    double gap() const noexcept
    {
        return std::exp(log_gap_);
    }
    double value() const noexcept
    {
        return -std::expm1(log_gap_);
    }
    // c^p for p >= 0.
    double pow(double p) const noexcept
    {
        if (p == 0) {
            return 1;
        }
        return std::exp(p * std::log1p(-gap()));
    }
    // 1 / (1 - c), possibly +inf.
    double inverse_gap() const noexcept
    {
        return std::exp(-log_gap_);
    }
    bool strictly_inside_unit_interval() const noexcept
    {
        return std::isfinite(log_gap_) && log_gap_ < 0;
    }

    // Ordered by the factor itself: a smaller gap is a larger factor.
    std::partial_ordering operator<=>(const Contraction &o) const noexcept
    {
        return o.log_gap_ <=> log_gap_;
    }
    bool operator==(const Contraction &o) const noexcept = default;

private:
    explicit Contraction(double log_gap) : log_gap_(log_gap) {}

    double log_gap_ = 0;
};

// Everything the rate functions depend on.
struct RateParams {
    WeightBounds bounds;
    int n = 2;
    double tau_D = 1;
    // Length of the estimation horizon; n * (T + 2 tau_D) in the SISS/SiISS constructions.
    double T_star = 1;

    void validate() const
    {
        bounds.validate();
        if (n < 2) {
            throw invalid_input("rate functions need n >= 2 followers");
        }
        if (!(tau_D > 0)) {
            throw invalid_input("rate functions need tau_D > 0");
        }
        if (!(T_star >= tau_D)) {
            throw invalid_input("rate functions need T_star >= tau_D");
        }
    }

    // b_lo + (n - 1) a_hi
    double lambda() const noexcept
    {
        return bounds.b_lo + (n - 1) * bounds.a_hi;
    }
    // (n - 2) a_hi + a_lo
    double lambda1() const noexcept
    {
        return (n - 2) * bounds.a_hi + bounds.a_lo;
    }
    double spread_rate() const noexcept
    {
        return (n - 1) * bounds.a_hi;
    }
};

namespace detail
{

// log(1 - e^{-r s}) for r, s >= 0, accurate at both ends.
inline double log_one_minus_exp(double r, double s)
{
    const double x = r * s;
    return x < std::numbers::ln2 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

inline void check_domain(double s, const RateParams &p, const char *who)
{
    const double slack = 1e-12 * std::max(1.0, p.T_star);
    if (!(s >= 0 && s <= p.T_star + slack)) {
        throw invalid_input(std::string(who) + ": argument " + std::to_string(s) + " outside [0, T_star]");
    }
}

inline void check_open_factor(const Contraction &c, const char *who)
{
    if (!c.strictly_inside_unit_interval()) {
        throw invalid_input(std::string(who) + ": base factor must lie in (0, 1)");
    }
}

} // namespace detail

// Bound on a follower's distance after it has held a leader arc for tau_D:
// (b e^{-lambda s} + (n-1) a_hi) / lambda on [0, tau_D); afterwards relaxes
// back toward one at rate (n-1) a_hi.
inline Contraction leader_link_factor(double s, const RateParams &p)
{
    p.validate();
    detail::check_domain(s, p, "leader_link_factor");
    const double lam = p.lambda();
    const double log_scale = std::log(p.bounds.b_lo / lam);
    if (s < p.tau_D) {
        return Contraction::from_log_gap(log_scale + detail::log_one_minus_exp(lam, s));
    }
    const double at_dwell = log_scale + detail::log_one_minus_exp(lam, p.tau_D);
    return Contraction::from_log_gap(at_dwell - p.spread_rate() * (s - p.tau_D));
}

// Same shape for a follower fed by a neighbor that already carries the
// factor `upstream`; the fast phase uses lambda1, the relaxation (n-1) a_hi.
inline Contraction relay_link_factor(double s, const Contraction &upstream, const RateParams &p)
{
    p.validate();
    detail::check_domain(s, p, "relay_link_factor");
    detail::check_open_factor(upstream, "relay_link_factor");
    const double lam1 = p.lambda1();
    const double log_scale = upstream.log_gap() + std::log(p.bounds.a_lo / lam1);
    if (s < p.tau_D) {
        return Contraction::from_log_gap(log_scale + detail::log_one_minus_exp(lam1, s));
    }
    const double at_dwell = log_scale + detail::log_one_minus_exp(lam1, p.tau_D);
    return Contraction::from_log_gap(at_dwell - p.spread_rate() * (s - p.tau_D));
}

// sqrt(2) (1 + (n-1) a_hi T_star) / ((n-1) a_hi)
inline double leader_link_gain(const RateParams &p)
{
    p.validate();
    return std::sqrt(2.0) * (1 + p.spread_rate() * p.T_star) / p.spread_rate();
}

// sqrt(2) (1 + (n-1) a_hi T_star) / ((n-2) a_hi + a_lo)
inline double relay_link_gain(const RateParams &p)
{
    p.validate();
    return std::sqrt(2.0) * (1 + p.spread_rate() * p.T_star) / p.lambda1();
}

// (1 + (n-1) a_hi tau_D) / (b_lo + (n-1) a_hi), the input gain of the fast phase.
inline double leader_dwell_gain(const RateParams &p)
{
    p.validate();
    return (1 + p.spread_rate() * p.tau_D) / p.lambda();
}

// (b e^{-lambda s} + (n-1) a_hi) / lambda for s >= 0; strictly decreasing, one at zero.
inline Contraction leader_dwell_factor(double s, const RateParams &p)
{
    p.validate();
    if (!(s >= 0)) {
        throw invalid_input("leader_dwell_factor: argument must be nonnegative");
    }
    return Contraction::from_log_gap(std::log(p.bounds.b_lo / p.lambda()) + detail::log_one_minus_exp(p.lambda(), s));
}

// 1 - e^{-(n-1) a_hi s} (1 - eps): how far a contracted bound relaxes while unconnected.
inline Contraction relapse_factor(const Contraction &eps, double s, const RateParams &p)
{
    p.validate();
    detail::check_open_factor(eps, "relapse_factor");
    if (!(s >= 0)) {
        throw invalid_input("relapse_factor: argument must be nonnegative");
    }
    return Contraction::from_log_gap(eps.log_gap() - p.spread_rate() * s);
}

// ((n-2) a_hi + (d0 + (1 - d0) e^{-lambda1 s}) a_lo) / lambda1: contraction
// passed along a follower arc held for s, from a neighbor bounded by d0.
inline Contraction relay_dwell_factor(const Contraction &d0, double s, const RateParams &p)
{
    p.validate();
    detail::check_open_factor(d0, "relay_dwell_factor");
    if (!(s >= 0)) {
        throw invalid_input("relay_dwell_factor: argument must be nonnegative");
    }
    return Contraction::from_log_gap(d0.log_gap() + std::log(p.bounds.a_lo / p.lambda1())
                                     + detail::log_one_minus_exp(p.lambda1(), s));
}

// eta_1 = leader_link(T_star), eta_j = relay_link_{eta_{j-1}}((n - j + 1) T0).
inline std::vector<Contraction> siss_chain(const RateParams &p, double T0)
{
    std::vector<Contraction> chain{leader_link_factor(p.T_star, p)};
    for (int j = 2; j <= p.n; ++j) {
        chain.push_back(relay_link_factor((p.n - j + 1) * T0, chain.back(), p));
    }
    return chain;
}

// c_1 = relapse_{delta(tau)}(T_star); c_l = relapse_{v_l}(T_star) with v_l = relay_dwell_{c_{l-1}}(tau).
inline std::vector<Contraction> ujlc_siiss_chain(const RateParams &p)
{
    std::vector<Contraction> chain{relapse_factor(leader_dwell_factor(p.tau_D, p), p.T_star, p)};
    for (int l = 2; l <= p.n; ++l) {
        const Contraction relayed = relay_dwell_factor(chain.back(), p.tau_D, p);
        chain.push_back(relapse_factor(relayed, p.T_star, p));
    }
    return chain;
}

// delta_1 = delta(tau); delta_{k+1} = relay_dwell_{relapse_{delta_k}(tau)}(tau).
inline std::vector<Contraction> bidirectional_chain(const RateParams &p)
{
    std::vector<Contraction> chain{leader_dwell_factor(p.tau_D, p)};
    for (int kappa = 1; kappa < p.n; ++kappa) {
        chain.push_back(relay_dwell_factor(relapse_factor(chain.back(), p.tau_D, p), p.tau_D, p));
    }
    return chain;
}

// d_1 = delta(tau); d_j = relay_dwell_{d_{j-1}}(tau).
inline std::vector<Contraction> acyclic_chain(const RateParams &p)
{
    std::vector<Contraction> chain{leader_dwell_factor(p.tau_D, p)};
    for (int j = 2; j <= p.n; ++j) {
        chain.push_back(relay_dwell_factor(chain.back(), p.tau_D, p));
    }
    return chain;
}

// All constants of the constructive SISS and SiISS certificates for one
// system, given the dwell time and a UJLC window T.
struct CertificateBundle {
    WeightBounds bounds;
    int n = 2;
    double tau_D = 0;
    double T = 0;

    double lambda = 0;
    double lambda1 = 0;
    double T0 = 0;
    double T_star = 0;

    double c0 = 0;
    double gamma1 = 0;
    double gamma2 = 0;

    std::vector<Contraction> eta_chain;
    Contraction eta_star;
    std::vector<Contraction> c_chain;
    Contraction c_hat;
    std::vector<Contraction> delta_chain;
    Contraction delta_hat;
    std::vector<Contraction> d_chain;

    RateParams rate_params() const
    {
        return RateParams{bounds, n, tau_D, T_star};
    }
};

inline CertificateBundle certify(const WeightBounds &bounds, int n, double tau_D, double T)
{
    if (!(T > 0)) {
        throw invalid_input("certify: window T must be positive");
    }
    CertificateBundle b;
    b.bounds = bounds;
    b.n = n;
    b.tau_D = tau_D;
    b.T = T;
    b.T0 = T + 2 * tau_D;
    b.T_star = n * b.T0;
    const RateParams p{bounds, n, tau_D, b.T_star};
    p.validate();
    b.lambda = p.lambda();
    b.lambda1 = p.lambda1();
    b.c0 = leader_dwell_gain(p);
    b.gamma1 = leader_link_gain(p);
    b.gamma2 = relay_link_gain(p);
    b.eta_chain = siss_chain(p, b.T0);
    b.eta_star = b.eta_chain.back();
    b.c_chain = ujlc_siiss_chain(p);
    b.c_hat = b.c_chain.back();
    b.delta_chain = bidirectional_chain(p);
    b.delta_hat = b.delta_chain.back();
    b.d_chain = acyclic_chain(p);
    for (const auto *chain : {&b.eta_chain, &b.c_chain, &b.delta_chain, &b.d_chain}) {
        for (const auto &c : *chain) {
            if (!c.strictly_inside_unit_interval()) {
                throw certificate_failure("certify: a chain constant left (0, 1)");
            }
        }
    }
    return b;
}

// beta(r, t) = rate^{floor(t / period)} r  and  gamma(s) = gain * s.
struct SissEnvelope {
    Contraction rate;
    double period = 1;
    // Input gain accumulated over one period.
    double period_gain = 0;
    double gain = 0;

    double beta(double r, double t) const
    {
        return rate.pow(std::floor(t / period)) * r;
    }
    double gamma(double s) const
    {
        return gain * s;
    }
    // dist(N period) <= rate^N dist0 + sum_{j<N} rate^j period_gain z_sup.
    double discrete_bound(int periods, double dist0, double z_sup) const
    {
        double geometric = 0;
        for (int j = 0; j < periods; ++j) {
            geometric += rate.pow(j);
        }
        return rate.pow(periods) * dist0 + geometric * period_gain * z_sup;
    }
};

inline SissEnvelope siss_envelope(const CertificateBundle &b)
{
    if (!b.eta_star.strictly_inside_unit_interval()) {
        throw certificate_failure("siss_envelope: eta_star must lie in (0, 1)");
    }
    SissEnvelope e;
    e.rate = b.eta_star;
    e.period = b.T_star;
    e.period_gain = (1 + 2 * std::sqrt(2.0)) * b.eta_star.value() * b.T_star + (b.n - 1) * b.gamma2 + b.gamma1;
    e.gain = e.period_gain * b.eta_star.inverse_gap() + b.T_star;
    return e;
}

// rate^K dist0 + gain * sum_{i=1}^{K} rate^{K-i} I_i for K = 1..len(I),
// where I_i is the input integral over the i-th interval.
struct RecursiveBound {
    Contraction rate;
    double gain = 0;

    std::vector<double> evaluate(double dist0, std::span<const double> interval_integrals) const
    {
        std::vector<double> out;
        double accumulated = 0;
        for (std::size_t K = 1; K <= interval_integrals.size(); ++K) {
            accumulated = rate.pow(1) * accumulated + interval_integrals[K - 1];
            out.push_back(rate.pow(static_cast<double>(K)) * dist0 + gain * accumulated);
        }
        return out;
    }
};

enum class Connectivity { ujlc, jlc_bidirectional, jlc_acyclic };

inline const char *to_string(Connectivity c)
{
    switch (c) {
        case Connectivity::ujlc:
            return "ujlc";
        case Connectivity::jlc_bidirectional:
            return "jlc_bidirectional";
        case Connectivity::jlc_acyclic:
            return "jlc_acyclic";
    }
    return "unknown";
}

// beta(r, t) = rate^{periods(t)} r and gamma(s) = gain * s, with periods(t)
// counted either on a uniform grid of length `period` or on explicit marks.
struct SiissEnvelope {
    Connectivity connectivity = Connectivity::ujlc;
    Contraction rate;
    double gain = 0;
    // UJLC window used to build the rate; only meaningful for Connectivity::ujlc.
    double T = 0;
    double period = 0;
    // Major marks T_1 = 0 < T_2 < ... for the JLC variants.
    std::vector<double> marks;

    double completed_periods(double t) const
    {
        if (marks.empty()) {
            return std::floor(t / period);
        }
        std::size_t passed = 0;
        while (passed < marks.size() && marks[passed] <= t) {
            ++passed;
        }
        return passed == 0 ? 0.0 : static_cast<double>(passed - 1);
    }
    double beta(double r, double t) const
    {
        return rate.pow(completed_periods(t)) * r;
    }
    double gamma(double s) const
    {
        return gain * s;
    }
    RecursiveBound recursion() const
    {
        return {rate, gain};
    }
};

// c_hat with gamma(s) = (4n + 1) sqrt(2) s on a uniform T_star grid.
inline SiissEnvelope siiss_envelope_ujlc(const CertificateBundle &b)
{
    SiissEnvelope e;
    e.connectivity = Connectivity::ujlc;
    e.rate = b.c_hat;
    e.gain = (4 * b.n + 1) * std::sqrt(2.0);
    e.T = b.T;
    e.period = b.T_star;
    return e;
}

// Checks the mark layout K * n + 1 marks, starting at zero, strictly increasing,
// and returns the major marks T_1, ..., T_{K+1}.
inline std::vector<double> major_marks(std::span<const double> marks, int n)
{
    if (n < 2) {
        throw invalid_input("major_marks: need n >= 2");
    }
    if (marks.empty() || (marks.size() - 1) % static_cast<std::size_t>(n) != 0) {
        throw invalid_input("major_marks: expected K * n + 1 marks");
    }
    if (marks.front() != 0) {
        throw invalid_input("major_marks: first mark must be 0");
    }
    for (std::size_t i = 1; i < marks.size(); ++i) {
        if (!(marks[i] > marks[i - 1])) {
            throw invalid_input("major_marks: marks must be strictly increasing");
        }
    }
    std::vector<double> major;
    for (std::size_t i = 0; i < marks.size(); i += static_cast<std::size_t>(n)) {
        major.push_back(marks[i]);
    }
    return major;
}

// delta_hat recursion at the major marks of a JLC schedule with bidirectional
// or acyclic follower graphs; gamma(s) = (4n + 1) sqrt(2) s.
inline SiissEnvelope siiss_envelope_jlc(const WeightBounds &bounds, int n, double tau_D, std::span<const double> marks,
                                        Connectivity kind)
{
    if (kind == Connectivity::ujlc) {
        throw invalid_input("siiss_envelope_jlc: expects a JLC connectivity kind");
    }
    const RateParams p{bounds, n, tau_D, tau_D};
    p.validate();
    SiissEnvelope e;
    e.connectivity = kind;
    e.rate = bidirectional_chain(p).back();
    e.gain = (4 * n + 1) * std::sqrt(2.0);
    e.marks = major_marks(marks, n);
    return e;
}

} // namespace hullswarm
