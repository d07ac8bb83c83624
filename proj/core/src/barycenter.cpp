#include "cat0/barycenter.hpp"

#include "cat0/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace cat0 {

namespace {

std::size_t heaviest_atom(const DiscreteMeasure& nu) {
    const auto w = nu.weights();
    return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
}

BarycenterResult euclidean_barycenter(const DiscreteMeasure& nu) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(nu.space().dimension());
    for (std::size_t i = 0; i < nu.size(); ++i) mean += nu.weight(i) * nu.atom(i).vector();
    Point c = Point::euclidean(std::move(mean));
    const double f = frechet_value(nu, c);
    return {std::move(c), f, ClosedForm{}};
}

// Distance from tree vertex v to a tree point.
double vertex_to_point(const MetricTree& tree, std::size_t v, const TreeCoords& a) {
    if (a.at_vertex()) return tree.vertex_distance(v, a.vertex);
    const auto& ed = tree.edge(a.edge);
    return std::min(tree.vertex_distance(v, ed.from) + a.offset,
                    tree.vertex_distance(v, ed.to) + ed.length - a.offset);
}

/*
 * F restricted to the edge e leaving v is sum_i w_i (s - c_i)^2 where s is the
 * arclength from v and c_i is the signed position of atom i: positive when its
 * geodesic from v leaves through e, negative otherwise. Its minimizer is the
 * weighted mean of the c_i; v is optimal when no incident edge has a positive
 * mean, and at most one edge can (the one-sided derivatives are -2 * mean).
 */
BarycenterResult tree_barycenter(const DiscreteMeasure& nu) {
    const Space& space = nu.space();
    const MetricTree& tree = space.tree();

    const TreeCoords& start = nu.atom(heaviest_atom(nu)).tree();
    std::size_t v = start.at_vertex() ? start.vertex : tree.edge(start.edge).from;

    std::vector<double> dv(nu.size());
    for (std::size_t steps = 0; steps <= tree.vertex_count(); ++steps) {
        for (std::size_t i = 0; i < nu.size(); ++i) dv[i] = vertex_to_point(tree, v, nu.atom(i).tree());

        std::size_t best_edge = npos;
        double best_mean = 0.0;
        for (std::size_t e : tree.incident_edges(v)) {
            const auto& ed = tree.edge(e);
            const std::size_t u = tree.other_end(e, v);
            double mean = 0.0;
            for (std::size_t i = 0; i < nu.size(); ++i) {
                const TreeCoords& a = nu.atom(i).tree();
                double c;
                if (a.at_vertex() && a.vertex == v) {
                    c = 0.0;
                } else if (!a.at_vertex() && a.edge == e) {
                    c = (v == ed.from) ? a.offset : ed.length - a.offset;
                } else {
                    c = vertex_to_point(tree, u, a) < dv[i] ? dv[i] : -dv[i];
                }
                mean += nu.weight(i) * c;
            }
            if (mean > best_mean) {
                best_mean = mean;
                best_edge = e;
            }
        }

        if (best_edge == npos) {
            Point c = Point::tree_vertex(v);
            const double f = frechet_value(nu, c);
            return {std::move(c), f, ConvexDescent{steps}};
        }
        const auto& ed = tree.edge(best_edge);
        if (best_mean < ed.length) {
            Point c = space.tree_point(best_edge, v == ed.from ? best_mean : ed.length - best_mean);
            const double f = frechet_value(nu, c);
            return {std::move(c), f, ConvexDescent{steps + 1}};
        }
        v = tree.other_end(best_edge, v);
    }
    throw NonConvergenceError("tree descent revisited a vertex", Point::tree_vertex(v));
}

/*
 * Karcher iteration x <- exp_x(tau * m), m = sum_i w_i log_x(a_i). The step
 * tau = 2 / (1 + H) with H = sum_i w_i d_i coth(d_i) bounds the Hessian
 * spectrum of F/2 in curvature -1; tau = 1 would oscillate for spread data.
 */
BarycenterResult karcher_barycenter(const DiscreteMeasure& nu) {
    const Space& space = nu.space();
    Point x = nu.atom(heaviest_atom(nu));
    double fx = frechet_value(nu, x);
    Point best = x;
    double best_norm = std::numeric_limits<double>::infinity();
    std::size_t best_it = 0;

    for (std::size_t it = 0; it < kKarcherMaxIterations; ++it) {
        const TangentVector m = tangent_mean(nu, x);
        const double g = tangent_norm(space, m);
        if (g < best_norm) {
            best_norm = g;
            best = x;
            best_it = it;
        }
        if (g <= kKarcherTarget) return {x, fx, FixedPoint{it, g}};
        if (best_norm <= kKarcherTolerance && it - best_it >= 20)
            return {best, frechet_value(nu, best), FixedPoint{it, best_norm}};

        double h = 0.0;
        for (std::size_t i = 0; i < nu.size(); ++i) {
            const double d = distance(space, x, nu.atom(i));
            h += nu.weight(i) * (d > 1e-8 ? d / std::tanh(d) : 1.0);
        }
        double tau = std::min(1.0, 2.0 / (1.0 + h));
        Point next = exp_map(space, {x, tau * m.coeffs});
        double fn = frechet_value(nu, next);
        // Far from the optimum insist on descent; near it F is flat to rounding.
        while (fn > fx && g > 1e-6 && tau > 1e-6) {
            tau *= 0.5;
            next = exp_map(space, {x, tau * m.coeffs});
            fn = frechet_value(nu, next);
        }
        x = std::move(next);
        fx = fn;
    }
    throw NonConvergenceError("Karcher iteration did not reach tangent-mean norm " +
                                  std::to_string(kKarcherTolerance),
                              best);
}

// Componentwise barycenters; fixed point dominates descent dominates closed form.
Certificate combine(const Certificate& a, const Certificate& b) {
    if (std::holds_alternative<FixedPoint>(a) || std::holds_alternative<FixedPoint>(b)) {
        FixedPoint out;
        for (const auto* c : {&a, &b})
            if (const auto* fp = std::get_if<FixedPoint>(c)) {
                out.iterations = std::max(out.iterations, fp->iterations);
                out.gradient_norm = std::hypot(out.gradient_norm, fp->gradient_norm);
            }
        return out;
    }
    if (std::holds_alternative<ConvexDescent>(a) || std::holds_alternative<ConvexDescent>(b)) {
        std::size_t steps = 0;
        for (const auto* c : {&a, &b})
            if (const auto* cd = std::get_if<ConvexDescent>(c)) steps += cd->steps;
        return ConvexDescent{steps};
    }
    return ClosedForm{};
}

}  // namespace

double frechet_value(const DiscreteMeasure& nu, const Point& x) {
    double f = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const double d = distance(nu.space(), x, nu.atom(i));
        f += nu.weight(i) * d * d;
    }
    return f;
}

TangentVector tangent_mean(const DiscreteMeasure& nu, const Point& x) {
    const Space& space = nu.space();
    Eigen::VectorXd m = Eigen::VectorXd::Zero(space.tangent_dimension());
    for (std::size_t i = 0; i < nu.size(); ++i) m += nu.weight(i) * log_map(space, x, nu.atom(i)).coeffs;
    return {x, std::move(m)};
}

BarycenterResult barycenter(const DiscreteMeasure& nu) {
    if (nu.size() == 1) return {nu.atom(0), 0.0, ClosedForm{}};
    const Space& space = nu.space();
    switch (space.kind()) {
        case SpaceKind::euclidean: return euclidean_barycenter(nu);
        case SpaceKind::metric_tree: return tree_barycenter(nu);
        case SpaceKind::hyperboloid: return karcher_barycenter(nu);
        case SpaceKind::product: break;
    }
    // F splits over l2 product components.
    std::vector<Point> parts;
    Certificate cert = ClosedForm{};
    for (std::size_t i = 0; i < space.components().size(); ++i) {
        auto r = barycenter(nu.component(i));
        parts.push_back(std::move(r.point));
        cert = combine(cert, r.certificate);
    }
    Point c = Point::product(std::move(parts));
    const double f = frechet_value(nu, c);
    return {std::move(c), f, cert};
}

Point generic_barycenter_crosscheck(const DiscreteMeasure& nu, std::uint64_t seed, std::size_t draws) {
    Rng rng(seed);
    std::discrete_distribution<std::size_t> pick(nu.weights().begin(), nu.weights().end());
    Point s = nu.atom(pick(rng));
    for (std::size_t k = 1; k < draws; ++k)
        s = geodesic_point(nu.space(), s, nu.atom(pick(rng)), 1.0 / static_cast<double>(k + 1));
    return s;
}

double variance_defect(const DiscreteMeasure& nu, const Point& z) {
    const Space& space = nu.space();
    const Point c = barycenter(nu).point;
    double lhs = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const double dz = distance(space, z, nu.atom(i));
        const double dc = distance(space, c, nu.atom(i));
        lhs += nu.weight(i) * (dz * dz - dc * dc);
    }
    const double dzc = distance(space, z, c);
    return lhs - dzc * dzc;
}

double distance_jensen_defect(const DiscreteMeasure& nu, const Point& p0) {
    const Space& space = nu.space();
    double mean = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) mean += nu.weight(i) * distance(space, p0, nu.atom(i));
    return mean - distance(space, p0, barycenter(nu).point);
}

}  // namespace cat0
