#pragma once

// Expectations of maps from finite product mm-spaces into CAT(0) targets,
// the repeated integral E_y(E(f^y)), and the gap between them.

#include "cat0/measures.hpp"
#include "cat0/spaces.hpp"

#include <vector>

namespace cat0 {

/// (sum_{x,x'} w_x w_x' d(f(x), f(x'))^p)^(1/p) over ordered pairs.
double variation(const MapTable& f, double p);

/// variation(f, p)^p without the final root.
double variation_power(const MapTable& f, double p);

/// Barycenter of the pushforward f_* mu.
Point expectation(const MapTable& f);

/// g_f(y) = E(f^y) for every sample y of the second factor.
std::vector<Point> slice_expectations(const MapTable& f);

/// E(g_f): barycenter of the slice expectations weighted by mu_Y.
Point repeated_integral(const MapTable& f);

struct FubiniReport {
    Point expectation;  // E(f)
    Point repeated;     // E_y(E(f^y))
    double defect = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double slack1 = 0.0;  // v1 - defect
    double slack2 = 0.0;  // v2 / sqrt(3) - defect
    std::vector<Point> slice_expectations;

    // Intermediate steps of the 1/sqrt(3) bound.
    double spread_about_repeated = 0.0;   // sum w d(f, repeated)^2
    double half_spread_slack = 0.0;       // spread/2 - defect^2
    double two_thirds_slack = 0.0;        // (2/3) v2^2 - spread
};

FubiniReport fubini_report(const MapTable& f);

/// sum_x w_x d(f(x,y), f(x,y')) - d(g_f(y), g_f(y')).
double slice_contraction_defect(const MapTable& f, std::size_t y, std::size_t y_prime);

/// Same, reusing precomputed slice expectations.
double slice_contraction_defect(const MapTable& f, const std::vector<Point>& slices, std::size_t y,
                                std::size_t y_prime);

}  // namespace cat0
