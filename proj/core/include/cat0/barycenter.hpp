#pragma once

// Center of mass c(nu) of a finite measure on a CAT(0) target: the unique
// minimizer of F(x) = sum_i w_i d(x, a_i)^2.

#include "cat0/measures.hpp"
#include "cat0/spaces.hpp"

#include <cstdint>
#include <stdexcept>
#include <variant>

namespace cat0 {

struct ClosedForm {};

// Vertex-to-edge descent on a metric tree; `steps` vertices were left.
struct ConvexDescent {
    std::size_t steps = 0;
};

// Karcher iteration on a Hadamard target.
struct FixedPoint {
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
};

using Certificate = std::variant<ClosedForm, ConvexDescent, FixedPoint>;

struct BarycenterResult {
    Point point;
    double frechet_value = 0.0;
    Certificate certificate;
};

/// Karcher iteration aims for a tangent mean below kKarcherTarget and
/// settles for kKarcherTolerance once progress stalls at rounding level.
inline constexpr double kKarcherTarget = 1e-13;
inline constexpr double kKarcherTolerance = 1e-10;
inline constexpr std::size_t kKarcherMaxIterations = 10000;

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, Point best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const Point& best_iterate() const { return best_; }

private:
    Point best_;
};

BarycenterResult barycenter(const DiscreteMeasure& nu);

double frechet_value(const DiscreteMeasure& nu, const Point& x);

/// sum_i w_i log_x(a_i); zero exactly at the barycenter of a Hadamard target.
TangentVector tangent_mean(const DiscreteMeasure& nu, const Point& x);

/// Inductive mean S_{k+1} = geodesic(S_k, a, 1/(k+1)) with atoms drawn by
/// weight. Independent of the exact solvers; converges to c(nu).
Point generic_barycenter_crosscheck(const DiscreteMeasure& nu, std::uint64_t seed,
                                    std::size_t draws = 100000);

/// sum_i w_i (d(z,a_i)^2 - d(c,a_i)^2) - d(z,c)^2, nonnegative on CAT(0) targets.
double variance_defect(const DiscreteMeasure& nu, const Point& z);

/// sum_i w_i d(p0,a_i) - d(p0,c).
double distance_jensen_defect(const DiscreteMeasure& nu, const Point& p0);

}  // namespace cat0
