#include "cat0/barycenter.hpp"
#include "cat0/suites.hpp"
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

const Space kTripod = Space::metric_tree(MetricTree::tripod());

Point leg(int i, double r) { return kTripod.tree_point(static_cast<std::size_t>(i - 1), r); }

}  // namespace

TEST(Barycenter, EuclideanMean) {
    const Space r2 = Space::euclidean(2);
    const BarycenterResult r = barycenter(DiscreteMeasure::uniform(r2, {vec({0, 0}), vec({2, 0})}));
    EXPECT_EQ(r.point, vec({1, 0}));
    EXPECT_TRUE(std::holds_alternative<ClosedForm>(r.certificate));
}

TEST(Barycenter, WeightedMeanExact) {
    Rng rng(2);
    const Space r3 = Space::euclidean(3);
    for (int rep = 0; rep < 50; ++rep) {
        const DiscreteMeasure nu = random_measure(r3, 5, rng);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
        for (std::size_t i = 0; i < nu.size(); ++i) mean += nu.weight(i) * nu.atom(i).vector();
        EXPECT_LE((barycenter(nu).point.vector() - mean).norm(), 1e-14);
    }
}

TEST(Barycenter, TripodTwoLegs) {
    EXPECT_EQ(barycenter(DiscreteMeasure::uniform(kTripod, {leg(1, 1), leg(2, 1)})).point, kTripod.origin());
}

TEST(Barycenter, TripodMapPushforward) {
    const DiscreteMeasure nu(kTripod, {leg(1, 1), leg(2, 1), leg(3, 1)}, {0.25, 0.25, 0.5});
    EXPECT_EQ(barycenter(nu).point, kTripod.origin());
}

TEST(Barycenter, TripodCentreAndTip) {
    const BarycenterResult r = barycenter(DiscreteMeasure::uniform(kTripod, {kTripod.origin(), leg(3, 1)}));
    EXPECT_EQ(r.point, leg(3, 0.5));
    EXPECT_TRUE(std::holds_alternative<ConvexDescent>(r.certificate));
}

TEST(Barycenter, SingleAtomShortCircuits) {
    const BarycenterResult r = barycenter(DiscreteMeasure::dirac(kTripod, leg(2, 0.3)));
    EXPECT_EQ(r.point, leg(2, 0.3));
    EXPECT_TRUE(std::holds_alternative<ClosedForm>(r.certificate));
}

TEST(Barycenter, TreeBeatsGridSearch) {
    Rng rng(19);
    for (int rep = 0; rep < 100; ++rep) {
        const Space s = Space::metric_tree(random_tree(3 + static_cast<std::size_t>(rep % 6), rng));
        const DiscreteMeasure nu = random_measure(s, 1 + static_cast<std::size_t>(rep % 7), rng);
        const BarycenterResult r = barycenter(nu);
        const oracle::GridMin g = oracle::tree_grid_frechet(nu);
        EXPECT_LE(r.frechet_value, g.value + 1e-12);
        // F is 2-strongly convex along geodesics, so the grid minimizer is close.
        const oracle::TreeMetric d(s.tree());
        EXPECT_LE(d(oracle::tree_pos(s.tree(), r.point), g.where), 1e-3);
    }
}

TEST(Barycenter, HyperboloidTangentMean) {
    Rng rng(23);
    for (int dim = 1; dim <= 4; ++dim) {
        const Space h = Space::hyperboloid(dim);
        for (int rep = 0; rep < 30; ++rep) {
            const DiscreteMeasure nu = random_measure(h, 6, rng);
            const BarycenterResult r = barycenter(nu);
            EXPECT_LE(tangent_norm(h, tangent_mean(nu, r.point)), 1e-9);
            const auto* fp = std::get_if<FixedPoint>(&r.certificate);
            ASSERT_NE(fp, nullptr);
            EXPECT_LE(fp->gradient_norm, kKarcherTolerance);
        }
    }
}

TEST(Barycenter, ProductIsComponentwise) {
    Rng rng(29);
    const Space p = Space::product({kTripod, Space::hyperboloid(2)});
    for (int rep = 0; rep < 30; ++rep) {
        const DiscreteMeasure nu = random_measure(p, 5, rng);
        const Point c = barycenter(nu).point;
        for (std::size_t k = 0; k < 2; ++k)
            EXPECT_LE(distance(p.components()[k], c.parts()[k], barycenter(nu.component(k)).point), 1e-10);
    }
}

TEST(VarianceDefect, EuclideanIsZero) {
    Rng rng(31);
    const Space r2 = Space::euclidean(2);
    const DiscreteMeasure nu = random_measure(r2, 6, rng);
    EXPECT_NEAR(variance_defect(nu, vec({3, -1})), 0.0, 1e-10);
}

TEST(VarianceDefect, TripodTip) {
    const DiscreteMeasure nu = DiscreteMeasure::uniform(kTripod, {leg(1, 1), leg(2, 1)});
    EXPECT_NEAR(variance_defect(nu, leg(3, 1)), 2.0, 1e-12);
    EXPECT_NEAR(variance_defect(nu, kTripod.origin()), 0.0, 1e-12);
}

TEST(DistanceJensen, Values) {
    const DiscreteMeasure nu = DiscreteMeasure::uniform(kTripod, {leg(1, 1), leg(2, 1)});
    EXPECT_NEAR(distance_jensen_defect(nu, leg(3, 1)), 1.0, 1e-12);
    EXPECT_NEAR(distance_jensen_defect(DiscreteMeasure::dirac(kTripod, leg(2, 0.4)), leg(1, 0.7)), 0.0, 1e-12);

    const Space r1 = Space::euclidean(1);
    const DiscreteMeasure line(r1, {vec({1}), vec({2}), vec({4})}, {0.2, 0.3, 0.5});
    EXPECT_NEAR(distance_jensen_defect(line, vec({10})), 0.0, 1e-12);
}

TEST(Crosscheck, PointMass) {
    const Point c = generic_barycenter_crosscheck(DiscreteMeasure::dirac(kTripod, leg(1, 0.5)), 1, 1);
    EXPECT_EQ(c, leg(1, 0.5));
}

TEST(Crosscheck, AgreesWithExactSolvers) {
    const Space r1 = Space::euclidean(1);
    EXPECT_LE(std::abs(generic_barycenter_crosscheck(DiscreteMeasure::uniform(r1, {vec({0}), vec({1})}), 4)
                           .vector()(0) -
                       0.5),
              0.05);
    const DiscreteMeasure nu(kTripod, {leg(1, 1), leg(2, 1), leg(3, 1)}, {0.25, 0.25, 0.5});
    EXPECT_LE(distance(kTripod, generic_barycenter_crosscheck(nu, 9), kTripod.origin()), 0.05);
}
