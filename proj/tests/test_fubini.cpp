#include "cat0/barycenter.hpp"
#include "cat0/fubini.hpp"
#include "cat0/obsvar.hpp"
#include "cat0/suites.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cat0;

namespace {

struct TripodMap : ::testing::Test {
    MapTable f = tripod_example_map();
    const Space& t = f.target();
    oracle::TreeMetric d{t.tree()};

    Point leg(int i, double r) const { return t.tree_point(static_cast<std::size_t>(i - 1), r); }
    std::vector<double> weights() const { return std::vector<double>(4, 0.25); }
    std::vector<Point> values() const { return {f.values().begin(), f.values().end()}; }
};

MapTable constant_map(const Space& s, const Point& p) {
    const MMSpace ab = MMSpace::discrete({"a", "b"});
    return MapTable(product_mm(ab, MMSpace::discrete({"u", "v", "w"})), s, std::vector<Point>(6, p));
}

}  // namespace

TEST_F(TripodMap, ValuesLayout) {
    EXPECT_EQ(f.value(0, 0), leg(1, 1));
    EXPECT_EQ(f.value(1, 0), leg(2, 1));
    EXPECT_EQ(f.value(0, 1), leg(3, 1));
    EXPECT_EQ(f.value(1, 1), leg(3, 1));
}

TEST_F(TripodMap, VariationByEnumeration) {
    const double v1 = oracle::variation(values(), weights(), d, 1.0);
    const double v2 = oracle::variation(values(), weights(), d, 2.0);
    EXPECT_DOUBLE_EQ(v1, 1.25);
    EXPECT_DOUBLE_EQ(v2, std::sqrt(2.5));
    EXPECT_NEAR(variation(f, 1.0), v1, 1e-15);
    EXPECT_NEAR(variation(f, 2.0), v2, 1e-15);
}

TEST_F(TripodMap, Expectations) {
    EXPECT_EQ(expectation(f), t.origin());
    const auto slices = slice_expectations(f);
    ASSERT_EQ(slices.size(), 2u);
    EXPECT_EQ(slices[0], t.origin());
    EXPECT_EQ(slices[1], leg(3, 1));
    EXPECT_EQ(repeated_integral(f), leg(3, 0.5));
}

TEST_F(TripodMap, Report) {
    const FubiniReport r = fubini_report(f);
    EXPECT_NEAR(r.defect, d(t.origin(), leg(3, 0.5)), 1e-12);
    EXPECT_NEAR(r.defect, 0.5, 1e-12);
    EXPECT_NEAR(r.v1, 1.25, 1e-12);
    EXPECT_NEAR(r.v2 / std::sqrt(3.0), std::sqrt(5.0 / 6.0), 1e-12);
    EXPECT_NEAR(r.slack1, 0.75, 1e-12);
    EXPECT_NEAR(r.defect / r.v2, 0.5 / std::sqrt(2.5), 1e-12);
    EXPECT_GE(r.half_spread_slack, -1e-9);
    EXPECT_GE(r.two_thirds_slack, -1e-9);
}

TEST_F(TripodMap, SliceContraction) {
    EXPECT_NEAR(slice_contraction_defect(f, 0, 1), 1.0, 1e-12);
    EXPECT_EQ(slice_contraction_defect(f, 1, 1), 0.0);
}

TEST(Fubini, ConstantMap) {
    const Space h = Space::hyperboloid(2);
    Rng rng(1);
    const Point p = sample_point(h, rng);
    const MapTable f = constant_map(h, p);
    const FubiniReport r = fubini_report(f);
    EXPECT_EQ(r.defect, 0.0);
    EXPECT_EQ(r.v1, 0.0);
    EXPECT_EQ(r.v2, 0.0);
    EXPECT_LE(distance(h, expectation(f), p), 1e-15);
    EXPECT_EQ(variation(f, 3.0), 0.0);
}

TEST(Fubini, EuclideanCommutes) {
    Rng rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const Space r3 = Space::euclidean(3);
        const ProductMMSpace dom(random_mm_space(4, rng), random_mm_space(5, rng));
        const MapTable f = random_map(dom, r3, rng);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
        for (std::size_t k = 0; k < f.size(); ++k) mean += dom.joint().prob(k) * f.value(k).vector();
        EXPECT_LE((expectation(f).vector() - mean).norm(), 1e-12);
        EXPECT_LE(fubini_report(f).defect, 1e-9);
    }
}

TEST(Fubini, IndependentOfX) {
    const Space tri = Space::metric_tree(MetricTree::tripod());
    const MMSpace x = MMSpace::discrete({"a", "b", "c"});
    const MMSpace y = MMSpace::discrete({"u", "v"});
    const Point pu = tri.tree_point(0, 0.7), pv = tri.tree_point(2, 0.2);
    std::vector<Point> vals;
    for (int i = 0; i < 3; ++i) {
        vals.push_back(pu);
        vals.push_back(pv);
    }
    const MapTable f(product_mm(x, y), tri, vals);
    const auto slices = slice_expectations(f);
    EXPECT_EQ(slices[0], pu);
    EXPECT_EQ(slices[1], pv);
    EXPECT_NEAR(slice_contraction_defect(f, 0, 1), 0.0, 1e-12);
}

TEST(Fubini, IndependentOfY) {
    Rng rng(4);
    const Space tri = Space::metric_tree(MetricTree::tripod());
    const MMSpace x = random_mm_space(4, rng);
    const MMSpace y = MMSpace::discrete({"u", "v", "w"});
    std::vector<Point> g, vals;
    for (int i = 0; i < 4; ++i) g.push_back(sample_point(tri, rng));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) vals.push_back(g[static_cast<std::size_t>(i)]);
    const MapTable f(product_mm(x, y), tri, vals);
    const Point marginal = expectation(MapTable(x, tri, g));
    EXPECT_LE(distance(tri, repeated_integral(f), marginal), 1e-12);
}

TEST(Fubini, RandomMapsSatisfyBothBounds) {
    Rng rng(99);
    for (int rep = 0; rep < 300; ++rep) {
        const Space s = random_target(static_cast<TargetFamily>(rep % kTargetFamilies), rng);
        const ProductMMSpace dom(random_mm_space(1 + static_cast<std::size_t>(rep % 8), rng),
                                 random_mm_space(1 + static_cast<std::size_t>((rep / 8) % 8), rng));
        MapTable f = random_map(dom, s, rng);
        if (rep % 2) f = contract_to_lipschitz(f);
        const FubiniReport r = fubini_report(f);
        EXPECT_GE(r.slack1, -1e-9);
        EXPECT_GE(r.slack2, -1e-9);
        EXPECT_GE(r.half_spread_slack, -1e-9);
        EXPECT_GE(r.two_thirds_slack, -1e-9);
        EXPECT_GE(r.defect, 0.0);
    }
}
