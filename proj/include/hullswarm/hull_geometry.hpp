#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace hullswarm
{

using Point = Eigen::VectorXd;

// Row-major stack of agent states: one row per agent, one column per coordinate.
using StateMatrix = Eigen::MatrixXd;

// The polytope co{v_1, ..., v_k} spanned by the rows of a k x d matrix.
// Vertices may repeat or be affinely dependent.
class LeaderHull
{
public:
    LeaderHull() = default;

    explicit LeaderHull(StateMatrix vertices) : vertices_(std::move(vertices))
    {
        if (vertices_.rows() == 0) {
            throw invalid_input("LeaderHull: empty vertex list");
        }
        if (vertices_.cols() == 0) {
            throw invalid_input("LeaderHull: vertices must have dimension >= 1");
        }
        if (!vertices_.allFinite()) {
            throw invalid_input("LeaderHull: non-finite vertex coordinate");
        }
    }

    Eigen::Index size() const noexcept
    {
        return vertices_.rows();
    }
    Eigen::Index dimension() const noexcept
    {
        return vertices_.cols();
    }
    const StateMatrix &vertices() const noexcept
    {
        return vertices_;
    }
    Point vertex(Eigen::Index i) const
    {
        return vertices_.row(i).transpose();
    }

private:
    StateMatrix vertices_;
};

struct Projection {
    Point nearest;
    double distance = 0;
    // Barycentric weights over the hull vertices; nonnegative and summing to one.
    Eigen::VectorXd weights;
};

namespace detail
{

inline void check_dimension(const Point &x, const LeaderHull &hull, const char *who)
{
    if (hull.size() == 0) {
        throw invalid_input(std::string(who) + ": empty vertex list");
    }
    if (x.size() != hull.dimension()) {
        throw invalid_input(std::string(who) + ": point has dimension " + std::to_string(x.size())
                            + " but hull has dimension " + std::to_string(hull.dimension()));
    }
}

// Minimizes |sum_s alpha_s p_s| over the affine hull of the corral columns,
// returning weights that sum to one. Rank-deficient corrals get the
// minimum-norm solution.
inline Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd &shifted, const std::vector<Eigen::Index> &corral)
{
    const auto m = static_cast<Eigen::Index>(corral.size());
    Eigen::VectorXd alpha(m);
    if (m == 1) {
        alpha(0) = 1;
        return alpha;
    }
    const Eigen::VectorXd base = shifted.col(corral[0]);
    Eigen::MatrixXd diffs(shifted.rows(), m - 1);
    for (Eigen::Index s = 1; s < m; ++s) {
        diffs.col(s - 1) = shifted.col(corral[static_cast<std::size_t>(s)]) - base;
    }
    const Eigen::VectorXd beta = diffs.completeOrthogonalDecomposition().solve(-base);
    alpha(0) = 1 - beta.sum();
    alpha.tail(m - 1) = beta;
    return alpha;
}

} // namespace detail

// Nearest point of the hull to x, by Wolfe's minimum-norm-point iteration on
// the vertices translated so that x sits at the origin. Ties between
// equally good vertices are broken by lowest index.
inline Projection project(const Point &x, const LeaderHull &hull)
{
    detail::check_dimension(x, hull, "project");
    if (!x.allFinite()) {
        throw invalid_input("project: non-finite query point");
    }

    const Eigen::Index k = hull.size();
    const Eigen::MatrixXd shifted = (hull.vertices().rowwise() - x.transpose()).transpose();
    const Eigen::VectorXd sq_norms = shifted.colwise().squaredNorm().transpose();
    const double scale = std::max(sq_norms.maxCoeff(), std::numeric_limits<double>::min());

    // Optimality tolerance on the Wolfe gap |X|^2 - min_j <X, p_j>.
    constexpr double gap_tol = 1e-13;
    // Weights below this are considered to have left the corral.
    constexpr double drop_tol = 1e-15;

    Eigen::Index first = 0;
    for (Eigen::Index i = 1; i < k; ++i) {
        if (sq_norms(i) < sq_norms(first)) {
            first = i;
        }
    }

    std::vector<Eigen::Index> corral{first};
    std::vector<double> lambda{1.0};
    Eigen::VectorXd current = shifted.col(first);

    const int max_major = 50 * static_cast<int>(k) + 50;
    for (int major = 0; major < max_major; ++major) {
        const Eigen::VectorXd dots = shifted.transpose() * current;
        Eigen::Index entering = 0;
        for (Eigen::Index i = 1; i < k; ++i) {
            if (dots(i) < dots(entering)) {
                entering = i;
            }
        }
        const double current_sq = current.squaredNorm();
        if (current_sq - dots(entering) <= gap_tol * scale) {
            break;
        }
        if (std::find(corral.begin(), corral.end(), entering) != corral.end()) {
            break;
        }
        corral.push_back(entering);
        lambda.push_back(0.0);

        for (int minor = 0; minor <= static_cast<int>(k) + 1; ++minor) {
            const Eigen::VectorXd alpha = detail::affine_minimizer(shifted, corral);
            if ((alpha.array() > drop_tol).all()) {
                lambda.assign(alpha.data(), alpha.data() + alpha.size());
                break;
            }
            double theta = 1;
            for (std::size_t s = 0; s < corral.size(); ++s) {
                const double a = alpha(static_cast<Eigen::Index>(s));
                if (a <= drop_tol && lambda[s] - a > 0) {
                    theta = std::min(theta, lambda[s] / (lambda[s] - a));
                }
            }
            for (std::size_t s = 0; s < corral.size(); ++s) {
                lambda[s] = theta * alpha(static_cast<Eigen::Index>(s)) + (1 - theta) * lambda[s];
            }
            // Drop every weight that hit zero; among exact ties the
            // lowest vertex index leaves first, which the sweep preserves.
            std::vector<Eigen::Index> kept;
            std::vector<double> kept_lambda;
            for (std::size_t s = 0; s < corral.size(); ++s) {
                if (lambda[s] > drop_tol) {
                    kept.push_back(corral[s]);
                    kept_lambda.push_back(lambda[s]);
                }
            }
            if (kept.empty()) {
                // Cannot happen in exact arithmetic; fall back to the best vertex of the corral.
                Eigen::Index best = corral.front();
                for (auto c : corral) {
                    if (sq_norms(c) < sq_norms(best)) {
                        best = c;
                    }
                }
                kept = {best};
                kept_lambda = {1.0};
            }
            corral = std::move(kept);
            lambda = std::move(kept_lambda);
        }

        Eigen::VectorXd next = Eigen::VectorXd::Zero(shifted.rows());
        double total = 0;
        for (std::size_t s = 0; s < corral.size(); ++s) {
            total += lambda[s];
        }
        for (std::size_t s = 0; s < corral.size(); ++s) {
            lambda[s] /= total;
            next += lambda[s] * shifted.col(corral[s]);
        }
        if (next.squaredNorm() >= current_sq) {
            current = next;
            break;
        }
        current = next;
    }

    Projection out;
    out.weights = Eigen::VectorXd::Zero(k);
    for (std::size_t s = 0; s < corral.size(); ++s) {
        out.weights(corral[s]) += std::max(lambda[s], 0.0);
    }
    out.weights /= out.weights.sum();
    out.nearest = hull.vertices().transpose() * out.weights;
    out.distance = (x - out.nearest).norm();
    return out;
}

inline double distance(const Point &x, const LeaderHull &hull)
{
    return project(x, hull).distance;
}

// Gradient of the squared distance |x|_K^2, which is 2 (x - P_K(x)).
inline Point sq_distance_gradient(const Point &x, const LeaderHull &hull)
{
    return 2.0 * (x - project(x, hull).nearest);
}

// Both sides of <x_a - P(x_a), x_b - x_a> <= |x_a|_K * ||x_a|_K - |x_b|_K|.
// `sharp_rhs` is the tighter right side -|x_a|_K (|x_a|_K - |x_b|_K) that
// applies when x_a is strictly farther from the hull than x_b.
struct NeighborInequality {
    double lhs = 0;
    double rhs = 0;
    double sharp_rhs = 0;
    bool sharp_applies = false;
};

inline NeighborInequality neighbor_inequality(const Point &x_a, const Point &x_b, const LeaderHull &hull)
{
    detail::check_dimension(x_a, hull, "neighbor_inequality");
    detail::check_dimension(x_b, hull, "neighbor_inequality");
    const Projection pa = project(x_a, hull);
    const double db = distance(x_b, hull);
    NeighborInequality out;
    out.lhs = (x_a - pa.nearest).dot(x_b - x_a);
    out.rhs = pa.distance * std::abs(pa.distance - db);
    out.sharp_applies = pa.distance > db;
    out.sharp_rhs = -pa.distance * (pa.distance - db);
    return out;
}

} // namespace hullswarm
