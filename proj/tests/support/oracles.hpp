#pragma once

// Brute-force reference computations for the tests. Deliberately naive and
// independent of the library's solvers: only Point/Space accessors are used.

#include "cat0/measures.hpp"
#include "cat0/spaces.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace oracle {

// ------------------------------------------------------------------ trees

// Vertex distances by Dijkstra over the edge list.
inline std::vector<std::vector<double>> tree_vertex_distances(const cat0::MetricTree& t) {
    const std::size_t n = t.vertex_count();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : t.edges()) {
        adj[e.from].push_back({e.to, e.length});
        adj[e.to].push_back({e.from, e.length});
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
    for (std::size_t s = 0; s < n; ++s) {
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
        d[s][s] = 0.0;
        q.push({0.0, s});
        while (!q.empty()) {
            auto [du, u] = q.top();
            q.pop();
            if (du > d[s][u]) continue;
            for (auto [v, len] : adj[u])
                if (du + len < d[s][v]) {
                    d[s][v] = du + len;
                    q.push({d[s][v], v});
                }
        }
    }
    return d;
}

// A tree position as (edge, offset from edge.from); vertices become edge
// endpoints of an arbitrary incident edge.
struct TreePos {
    std::size_t edge;
    double offset;
};

inline TreePos tree_pos(const cat0::MetricTree& t, const cat0::Point& p) {
    const auto& c = p.tree();
    if (!c.at_vertex()) return {c.edge, c.offset};
    for (std::size_t e = 0; e < t.edge_count(); ++e) {
        if (t.edge(e).from == c.vertex) return {e, 0.0};
        if (t.edge(e).to == c.vertex) return {e, t.edge(e).length};
    }
    return {0, 0.0};  // single-vertex tree
}

class TreeMetric {
public:
    explicit TreeMetric(const cat0::MetricTree& t) : tree_(t), vd_(tree_vertex_distances(t)) {}

    double operator()(TreePos a, TreePos b) const {
        if (tree_.edge_count() == 0) return 0.0;
        const auto& ea = tree_.edge(a.edge);
        const auto& eb = tree_.edge(b.edge);
        if (a.edge == b.edge) return std::abs(a.offset - b.offset);
        const double la[2] = {a.offset, ea.length - a.offset};
        const double lb[2] = {b.offset, eb.length - b.offset};
        const std::size_t va[2] = {ea.from, ea.to};
        const std::size_t vb[2] = {eb.from, eb.to};
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) best = std::min(best, la[i] + vd_[va[i]][vb[j]] + lb[j]);
        return best;
    }
    double operator()(const cat0::Point& a, const cat0::Point& b) const {
        return (*this)(tree_pos(tree_, a), tree_pos(tree_, b));
    }

    const cat0::MetricTree& tree() const { return tree_; }

private:
    const cat0::MetricTree& tree_;
    std::vector<std::vector<double>> vd_;
};

struct GridMin {
    double value = std::numeric_limits<double>::infinity();
    TreePos where{0, 0.0};
};

// Minimum of sum_i w_i d(x, a_i)^2 over all edges sampled at `step`.
inline GridMin tree_grid_frechet(const cat0::DiscreteMeasure& nu, double step = 1e-3) {
    const cat0::MetricTree& t = nu.space().tree();
    const TreeMetric d(t);
    std::vector<TreePos> atoms;
    for (const auto& a : nu.atoms()) atoms.push_back(tree_pos(t, a));
    GridMin best;
    for (std::size_t e = 0; e < t.edge_count(); ++e) {
        const double len = t.edge(e).length;
        const auto steps = static_cast<std::size_t>(std::ceil(len / step));
        for (std::size_t k = 0; k <= steps; ++k) {
            const TreePos x{e, std::min(len, static_cast<double>(k) * step)};
            double f = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) f += nu.weight(i) * std::pow(d(x, atoms[i]), 2);
            if (f < best.value) best = {f, x};
        }
    }
    return best;
}

// ------------------------------------------------------------- transport

// Equal-weight W1 as the cheapest perfect matching, by enumerating all n!
// permutations.
inline double permutation_w1(const std::vector<cat0::Point>& a, const std::vector<cat0::Point>& b,
                             const std::function<double(const cat0::Point&, const cat0::Point&)>& dist) {
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += dist(a[i], b[perm[i]]);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(a.size());
}

// -------------------------------------------------------------- variation

// Direct double sum over ordered sample pairs.
inline double variation(const std::vector<cat0::Point>& values, const std::vector<double>& weights,
                        const std::function<double(const cat0::Point&, const cat0::Point&)>& dist, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = 0; j < values.size(); ++j)
            s += weights[i] * weights[j] * std::pow(dist(values[i], values[j]), p);
    return std::pow(s, 1.0 / p);
}

// --------------------------------------------------------------- spectra

// Cyclic Jacobi rotations; returns eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol = 1e-14) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < tol * tol) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Edge-averaged gap from an explicit edge list.
inline double graph_gap(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto [u, v] : edges) {
        const auto a = static_cast<Eigen::Index>(u), b = static_cast<Eigen::Index>(v);
        lap(a, a) += 1;
        lap(b, b) += 1;
        lap(a, b) -= 1;
        lap(b, a) -= 1;
    }
    return static_cast<double>(n) / static_cast<double>(edges.size()) * jacobi_eigenvalues(lap)[1];
}

// ---------------------------------------------------------------- obsvar

// sup V_2 of 1-Lipschitz f on two points at distance `gap` with weights
// (w, 1-w) into the line. Fix f(0) = 0; f(1) ranges over the polytope
// [-gap, gap], V_2 is convex in f(1), so the sup sits at a vertex.
inline double two_point_obsvar(double gap, double w) {
    double best = 0.0;
    for (double v : {-gap, 0.0, gap}) best = std::max(best, std::sqrt(2.0 * w * (1.0 - w) * v * v));
    return best;
}

}  // namespace oracle
