#include "cat0/errors.hpp"
#include "cat0/spaces.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cat0;

namespace {

Point vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return Point::euclidean(v);
}

struct Tripod : ::testing::Test {
    Space t = Space::metric_tree(MetricTree::tripod());
    oracle::TreeMetric d{t.tree()};

    Point leg(int i, double r) const { return t.tree_point(static_cast<std::size_t>(i - 1), r); }
    Point centre() const { return t.origin(); }
};

}  // namespace

TEST(Euclidean, Pythagoras) {
    const Space r2 = Space::euclidean(2);
    EXPECT_DOUBLE_EQ(distance(r2, vec({0, 0}), vec({3, 4})), 5.0);
}

TEST(Euclidean, GeodesicIsLinear) {
    const Space r2 = Space::euclidean(2);
    const Point g = geodesic_point(r2, vec({0, 0}), vec({2, 0}), 0.25);
    EXPECT_DOUBLE_EQ(g.vector()(0), 0.5);
    EXPECT_DOUBLE_EQ(g.vector()(1), 0.0);
}

TEST(Euclidean, LogIsDifference) {
    const Space r2 = Space::euclidean(2);
    const TangentVector v = log_map(r2, vec({1, 2}), vec({4, -1}));
    EXPECT_DOUBLE_EQ(v.coeffs(0), 3.0);
    EXPECT_DOUBLE_EQ(v.coeffs(1), -3.0);
    EXPECT_EQ(log_map(r2, vec({1, 2}), vec({1, 2})).coeffs.norm(), 0.0);
}

TEST(Euclidean, MidpointEquality) {
    const Space r3 = Space::euclidean(3);
    EXPECT_NEAR(cat0_midpoint_defect(r3, vec({0, 1, 2}), vec({-3, 0.5, 4}), vec({2, 2, -1})), 0.0, 1e-10);
}

TEST(Euclidean, ReshetnyakSquare) {
    const Space r2 = Space::euclidean(2);
    EXPECT_NEAR(reshetnyak_defect(r2, vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1})), 0.0, 1e-15);
}

TEST_F(Tripod, LegToLeg) {
    EXPECT_DOUBLE_EQ(distance(t, leg(1, 1), leg(2, 1)), 2.0);
    EXPECT_DOUBLE_EQ(d(leg(1, 1), leg(2, 1)), 2.0);
}

TEST_F(Tripod, CentreToHalfLeg) {
    EXPECT_DOUBLE_EQ(distance(t, centre(), leg(3, 0.5)), d(centre(), leg(3, 0.5)));
    EXPECT_DOUBLE_EQ(distance(t, centre(), leg(3, 0.5)), 0.5);
}

TEST_F(Tripod, MidpointOfCentreAndTip) {
    const Point m = geodesic_point(t, centre(), leg(3, 1), 0.5);
    EXPECT_EQ(m, leg(3, 0.5));
}

TEST_F(Tripod, GeodesicEndpoints) {
    EXPECT_EQ(geodesic_point(t, leg(1, 0.3), leg(2, 0.8), 0.0), leg(1, 0.3));
    EXPECT_EQ(geodesic_point(t, leg(1, 0.3), leg(2, 0.8), 1.0), leg(2, 0.8));
}

TEST_F(Tripod, GeodesicThroughCentre) {
    // 0.3 out on leg 1, then 0.8 out on leg 2; t = 0.5 sits 0.25 along leg 2.
    const Point g = geodesic_point(t, leg(1, 0.3), leg(2, 0.8), 0.5);
    EXPECT_NEAR(d(g, leg(2, 0.25)), 0.0, 1e-15);
}

TEST_F(Tripod, GeodesicRejectsOutOfRange) {
    EXPECT_THROW(geodesic_point(t, centre(), leg(1, 1), 1.5), DomainError);
    EXPECT_THROW(geodesic_point(t, centre(), leg(1, 1), -0.1), DomainError);
}

TEST_F(Tripod, VertexRepresentativesAgree) {
    EXPECT_EQ(leg(1, 0.0), centre());
    EXPECT_EQ(leg(2, 0.0), leg(3, 0.0));
    EXPECT_EQ(leg(1, 1.0), Point::tree_vertex(*t.tree().find_vertex("t1")));
}

TEST_F(Tripod, MidpointDefectAtThreeTips) {
    // Midpoint of the tips of legs 2 and 3 is the centre.
    const Point x = leg(1, 1), y = leg(2, 1), z = leg(3, 1);
    const double want = 0.5 * std::pow(d(x, y), 2) + 0.5 * std::pow(d(x, z), 2) - 0.25 * std::pow(d(y, z), 2) -
                        std::pow(d(x, centre()), 2);
    EXPECT_DOUBLE_EQ(want, 2.0);
    EXPECT_NEAR(cat0_midpoint_defect(t, x, y, z), want, 1e-12);
}

TEST_F(Tripod, MidpointDefectDegenerate) {
    EXPECT_NEAR(cat0_midpoint_defect(t, leg(1, 0.4), leg(2, 0.7), leg(2, 0.7)), 0.0, 1e-12);
}

TEST_F(Tripod, ReshetnyakFourPoints) {
    const Point x1 = leg(1, 1), x2 = leg(2, 1), x3 = leg(3, 1), x4 = centre();
    const double sides = std::pow(d(x1, x2), 2) + std::pow(d(x2, x3), 2) + std::pow(d(x3, x4), 2) +
                         std::pow(d(x4, x1), 2);
    const double diagonals = std::pow(d(x1, x3), 2) + std::pow(d(x2, x4), 2);
    EXPECT_DOUBLE_EQ(sides - diagonals, 5.0);
    EXPECT_NEAR(reshetnyak_defect(t, x1, x2, x3, x4), 5.0, 1e-12);
    EXPECT_EQ(reshetnyak_defect(t, x1, x1, x1, x1), 0.0);
}

TEST_F(Tripod, NoTangentMaps) {
    EXPECT_FALSE(t.has_tangent_maps());
    EXPECT_THROW(log_map(t, centre(), leg(1, 1)), UnsupportedSpaceError);
}

TEST(MetricTree, RandomTreeMatchesDijkstra) {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const Space s = Space::metric_tree(random_tree(2 + static_cast<std::size_t>(rep), rng));
        const oracle::TreeMetric d(s.tree());
        for (int k = 0; k < 50; ++k) {
            const Point a = sample_point(s, rng), b = sample_point(s, rng);
            EXPECT_NEAR(distance(s, a, b), d(a, b), 1e-12);
        }
    }
}

TEST(MetricTree, RejectsCycleAndBadLength) {
    using E = MetricTree::Edge;
    EXPECT_THROW(MetricTree({"a", "b", "c"}, {E{"x", 0, 1, 1}, E{"y", 1, 2, 1}, E{"z", 2, 0, 1}}), DomainError);
    EXPECT_THROW(MetricTree({"a", "b"}, {E{"x", 0, 1, 0.0}}), DomainError);
    EXPECT_THROW(MetricTree({"a", "b", "c"}, {E{"x", 0, 1, 1}}), DomainError);
}

TEST(Hyperboloid, OneDimensionalClosedForm) {
    const Space h1 = Space::hyperboloid(1);
    for (double s : {1e-9, 0.3, 1.0, 4.0, 12.0}) {
        Eigen::VectorXd y(2);
        y << std::cosh(s), std::sinh(s);
        const Point base = h1.origin(), target = Point::hyperboloid(y);
        EXPECT_NEAR(distance(h1, base, target), s, 1e-12 * std::max(1.0, s));
        const TangentVector v = log_map(h1, base, target);
        EXPECT_NEAR(tangent_norm(h1, v), s, 1e-10 * std::max(1.0, s));
        EXPECT_NEAR(minkowski(base.vector(), v.coeffs), 0.0, 1e-10);
        EXPECT_LE(distance(h1, exp_map(h1, v), target), 1e-9 * std::max(1.0, s));
    }
}

TEST(Hyperboloid, AlongOneLine) {
    // Points (cosh a, sinh a) lie on one geodesic with distance |a - b|.
    const Space h1 = Space::hyperboloid(1);
    auto at = [](double a) {
        Eigen::VectorXd y(2);
        y << std::cosh(a), std::sinh(a);
        return Point::hyperboloid(y);
    };
    EXPECT_NEAR(distance(h1, at(-1.5), at(2.0)), 3.5, 1e-12);
    const Point g = geodesic_point(h1, at(-1.5), at(2.0), 0.2);
    EXPECT_NEAR(distance(h1, g, at(-0.8)), 0.0, 1e-12);
}

TEST(Hyperboloid, StaysOnSheet) {
    const Space h3 = Space::hyperboloid(3);
    Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const Point a = sample_point(h3, rng, 2.0), b = sample_point(h3, rng, 2.0);
        const Point g = geodesic_point(h3, a, b, 0.37);
        const Point e = exp_map(h3, {a, 0.5 * log_map(h3, a, b).coeffs});
        for (const Point& p : {g, e}) {
            const Eigen::VectorXd& x = p.vector();
            EXPECT_NEAR(minkowski(x, x), -1.0, 1e-10 * x(0) * x(0));
            EXPECT_GT(x(0), 0.0);
        }
        EXPECT_NEAR(distance(h3, g, e), std::abs(0.37 - 0.5) * distance(h3, a, b), 1e-9);
    }
}

TEST(Hyperboloid, FarFromOriginRoundTrip) {
    const Space h2 = Space::hyperboloid(2);
    Eigen::VectorXd xs(3), ys(3);
    xs << 0, 4000.0, -2500.0;
    ys << 0, 4000.3, -2499.0;
    const Point x = h2.hyperboloid_point(xs), y = h2.hyperboloid_point(ys);
    const TangentVector v = log_map(h2, x, y);
    const double dxy = distance(h2, x, y);
    EXPECT_NEAR(tangent_norm(h2, v), dxy, 1e-10 * std::max(1.0, dxy));
    EXPECT_LE(distance(h2, exp_map(h2, v), y), 1e-9);
}

TEST(Product, DistanceIsL2) {
    const Space tri = Space::metric_tree(MetricTree::tripod());
    const Space p = Space::product({tri, Space::euclidean(1)});
    const Point a = Point::product({tri.tree_point(0, 1.0), vec({0})});
    const Point b = Point::product({tri.tree_point(1, 1.0), vec({1.5})});
    EXPECT_NEAR(distance(p, a, b), std::hypot(2.0, 1.5), 1e-12);
    const Point m = geodesic_point(p, a, b, 0.5);
    EXPECT_EQ(m.parts()[0], tri.origin());
    EXPECT_DOUBLE_EQ(m.parts()[1].vector()(0), 0.75);
}

TEST(Product, NeedsTwoComponents) {
    EXPECT_THROW(Space::product({Space::euclidean(1)}), DomainError);
}

TEST(Spaces, MismatchedTagsRejected) {
    const Space r2 = Space::euclidean(2);
    const Space tri = Space::metric_tree(MetricTree::tripod());
    EXPECT_THROW(distance(r2, vec({0, 0}), tri.origin()), DomainError);
    EXPECT_THROW(distance(r2, vec({0, 0}), vec({0, 0, 0})), DomainError);
    EXPECT_THROW(Space::euclidean(0), DomainError);
}

TEST(Seeds, DerivedSeedsAreStableAndDistinct) {
    EXPECT_EQ(derive_seed(42, 1, 0), derive_seed(42, 1, 0));
    EXPECT_NE(derive_seed(42, 1, 0), derive_seed(42, 1, 1));
    EXPECT_NE(derive_seed(42, 1, 0), derive_seed(42, 2, 0));
    EXPECT_NE(derive_seed(42, 1, 0), derive_seed(43, 1, 0));
}
