#include <catch_amalgamated.hpp>

#include <random>

#include "hullswarm/hull_geometry.hpp"
#include "support/oracles.hpp"

using namespace hullswarm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

Point pt(std::initializer_list<double> v)
{
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) {
        p(i++) = c;
    }
    return p;
}

LeaderHull hull_of(std::initializer_list<std::initializer_list<double>> rows)
{
    StateMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto &r : rows) {
        m.row(i++) = pt(r).transpose();
    }
    return LeaderHull(m);
}

} // namespace

TEST_CASE("interior point projects to itself")
{
    const auto hull = hull_of({{0, 0}, {2, 0}, {0, 2}, {2, 2}});
    const Point mean = hull.vertices().colwise().mean().transpose();
    const auto p = project(mean, hull);
    CHECK((p.nearest - mean).norm() < 1e-12);
    CHECK_THAT(p.distance, WithinAbs(0, 1e-12));
    CHECK_THAT(p.weights.sum(), WithinAbs(1, 1e-12));
}

TEST_CASE("singleton hull")
{
    const auto hull = hull_of({{1, -2, 3}});
    const Point x = pt({4, 2, 3});
    const auto p = project(x, hull);
    CHECK((p.nearest - hull.vertex(0)).norm() == 0);
    CHECK_THAT(p.distance, WithinAbs(5, 1e-14));
    CHECK((sq_distance_gradient(x, hull) - 2 * (x - hull.vertex(0))).norm() < 1e-14);
}

TEST_CASE("corner of a right triangle projects onto the hypotenuse midpoint")
{
    const auto hull = hull_of({{0, 0}, {2, 0}, {0, 2}});
    const auto p = project(pt({2, 2}), hull);
    CHECK((p.nearest - pt({1, 1})).norm() < 1e-12);
    CHECK_THAT(p.distance, WithinAbs(std::sqrt(2.0), 1e-12));
}

TEST_CASE("distance to a vertex and to a collinear segment")
{
    const auto tri = hull_of({{0, 0}, {2, 0}, {0, 2}});
    CHECK_THAT(distance(pt({2, 0}), tri), WithinAbs(0, 1e-14));
    const auto seg = hull_of({{0, 0}, {1, 0}});
    CHECK_THAT(distance(pt({3, 0}), seg), WithinAbs(2, 1e-14));
}

TEST_CASE("gradient vanishes inside the hull")
{
    const auto hull = hull_of({{0, 0}, {2, 0}, {0, 2}});
    CHECK(sq_distance_gradient(pt({0.5, 0.5}), hull).norm() < 1e-14);
}

TEST_CASE("invalid inputs are rejected")
{
    const auto hull = hull_of({{0, 0}, {1, 0}});
    CHECK_THROWS_AS(project(pt({1, 2, 3}), hull), invalid_input);
    CHECK_THROWS_AS(distance(pt({1}), hull), invalid_input);
    CHECK_THROWS_AS(LeaderHull(StateMatrix(0, 2)), invalid_input);
    CHECK_THROWS_AS(project(pt({1, 2}), LeaderHull()), invalid_input);
    StateMatrix bad(1, 2);
    bad << 1, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(LeaderHull(bad), invalid_input);
}

TEST_CASE("degenerate hulls: repeated and collinear vertices")
{
    const auto repeated = hull_of({{1, 1}, {1, 1}, {1, 1}});
    CHECK_THAT(distance(pt({4, 5}), repeated), WithinAbs(5, 1e-12));

    const auto line = hull_of({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {0.5, 0.5, 0.5}});
    const Point x = pt({3, 0, 0});
    const auto p = project(x, line);
    // Projection of (3,0,0) onto the diagonal is (1,1,1).
    CHECK((p.nearest - pt({1, 1, 1})).norm() < 1e-10);
    CHECK_THAT(p.weights.sum(), WithinAbs(1, 1e-12));
    CHECK((p.weights.array() >= 0).all());
}

TEST_CASE("ties between equally near vertices go to the lowest index")
{
    const auto hull = hull_of({{1, 0}, {-1, 0}, {1, 0}});
    const auto p = project(pt({5, 0}), hull);
    CHECK(p.weights(0) == 1);
    CHECK(p.weights(2) == 0);
}

TEST_CASE("projection agrees with subset enumeration on random instances")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> count(1, 6);
    for (int trial = 0; trial < 500; ++trial) {
        const int d = dim(rng);
        const int k = count(rng);
        const LeaderHull hull(oracle::random_matrix(k, d, rng));
        const Point x = oracle::random_matrix(d, 1, rng, 4).col(0);
        const auto p = project(x, hull);
        REQUIRE_THAT(p.distance, WithinAbs(oracle::face_distance(x, hull.vertices()), 1e-9));
        REQUIRE_THAT(p.weights.sum(), WithinAbs(1, 1e-12));
        REQUIRE((p.weights.array() >= 0).all());
        REQUIRE((hull.vertices().transpose() * p.weights - p.nearest).norm() < 1e-12);
        for (Eigen::Index v = 0; v < k; ++v) {
            REQUIRE((p.nearest - x).dot(p.nearest - hull.vertex(v)) <= 1e-9);
        }
    }
}

TEST_CASE("projection agrees with barycentric grid search")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const LeaderHull hull(oracle::random_matrix(5, 3, rng));
        const Point x = oracle::random_matrix(3, 1, rng, 3).col(0);
        REQUIRE_THAT(distance(x, hull), WithinAbs(oracle::grid_distance(x, hull.vertices()), 1e-4));
    }
}

TEST_CASE("idempotence and non-expansiveness")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const LeaderHull hull(oracle::random_matrix(4, 3, rng));
        const Point a = oracle::random_matrix(3, 1, rng, 5).col(0);
        const Point b = oracle::random_matrix(3, 1, rng, 5).col(0);
        const Point pa = project(a, hull).nearest;
        const Point pb = project(b, hull).nearest;
        REQUIRE((project(pa, hull).nearest - pa).norm() <= 1e-10);
        REQUIRE((pa - pb).norm() <= (a - b).norm() + 1e-9);
    }
}

TEST_CASE("gradient matches central differences away from the hull")
{
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 200) {
        const LeaderHull hull(oracle::random_matrix(4, 3, rng));
        const Point x = oracle::random_matrix(3, 1, rng, 4).col(0);
        if (distance(x, hull) <= 1e-3) {
            continue;
        }
        const Point g = sq_distance_gradient(x, hull);
        Point fd(3);
        const double h = 1e-6;
        for (int c = 0; c < 3; ++c) {
            Point e = Point::Zero(3);
            e(c) = h;
            const double up = distance(x + e, hull);
            const double down = distance(x - e, hull);
            fd(c) = (up * up - down * down) / (2 * h);
        }
        REQUIRE((g - fd).norm() <= 1e-4 * std::max(1.0, g.norm()));
        ++checked;
    }
}

TEST_CASE("neighbor inequality holds on random triples")
{
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> count(1, 5);
    for (int trial = 0; trial < 2000; ++trial) {
        const int d = dim(rng);
        const LeaderHull hull(oracle::random_matrix(count(rng), d, rng));
        const Point a = oracle::random_matrix(d, 1, rng, 4).col(0);
        const Point b = oracle::random_matrix(d, 1, rng, 4).col(0);
        const auto r = neighbor_inequality(a, b, hull);
        REQUIRE(r.lhs <= r.rhs + 1e-9);
        if (r.sharp_applies) {
            REQUIRE(r.lhs <= r.sharp_rhs + 1e-9);
        }
    }
}

TEST_CASE("neighbor inequality special cases")
{
    const auto hull = hull_of({{0, 0}, {2, 0}, {0, 2}});
    const auto inside = neighbor_inequality(pt({0.5, 0.5}), pt({7, -3}), hull);
    CHECK(inside.lhs == 0);
    CHECK(inside.rhs == 0);
    const auto same = neighbor_inequality(pt({3, 3}), pt({3, 3}), hull);
    CHECK(same.lhs == 0);
    CHECK(same.rhs == 0);
}
