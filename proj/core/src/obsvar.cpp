#include "cat0/obsvar.hpp"

#include "cat0/barycenter.hpp"
#include "cat0/errors.hpp"
#include "cat0/fubini.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace cat0 {

namespace {

constexpr std::size_t kProjectionSweeps = 20;
constexpr int kBisectionSteps = 40;
constexpr int kDirectionsPerSample = 4;

double powp(double d, double p) {
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    return std::pow(d, p);
}

std::vector<Point> values_of(const MapTable& f) { return {f.values().begin(), f.values().end()}; }

// Largest ratio d(cand, v_y) / D(x, y) over y != x.
double row_ratio(const MapTable& f, const std::vector<Point>& v, std::size_t x, const Point& cand) {
    const MMSpace& dom = f.domain();
    double worst = 0.0;
    for (std::size_t y = 0; y < v.size(); ++y)
        if (y != x) worst = std::max(worst, distance(f.target(), cand, v[y]) / dom.distance(x, y));
    return worst;
}

bool row_feasible(const MapTable& f, const std::vector<Point>& v, std::size_t x, const Point& cand) {
    const MMSpace& dom = f.domain();
    for (std::size_t y = 0; y < v.size(); ++y)
        if (y != x && distance(f.target(), cand, v[y]) > dom.distance(x, y)) return false;
    return true;
}

double max_ratio(const MapTable& f, const std::vector<Point>& v) {
    double worst = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b)
            worst = std::max(worst, distance(f.target(), v[a], v[b]) / f.domain().distance(a, b));
    return worst;
}

Point pushforward_barycenter(const MapTable& f, const std::vector<Point>& v) {
    return barycenter(pushforward(f.with_values(v))).point;
}

// A point roughly `reach` away from `base` in a random direction. Trees are
// bounded, so there the point is just somewhere on the far side.
Point far_point(const Space& target, const Point& base, Rng& rng, double reach) {
    Point z = sample_near(target, base, rng, reach);
    if (!target.has_tangent_maps()) return z;
    TangentVector v = log_map(target, base, z);
    const double n = tangent_norm(target, v);
    if (n == 0.0) return z;
    v.coeffs *= reach / n;
    return exp_map(target, v);
}

}  // namespace

LipschitzWitness certify_lipschitz(const MapTable& f, LipschitzDemand demand, double p) {
    LipschitzWitness w{f, 0.0, npos, npos, p, 0.0};
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = a + 1; b < f.size(); ++b) {
            const double r = distance(f.target(), f.value(a), f.value(b)) / f.domain().distance(a, b);
            if (r > w.lipschitz_constant || w.worst_u == npos) {
                w.lipschitz_constant = std::max(r, w.lipschitz_constant);
                w.worst_u = a;
                w.worst_v = b;
            }
        }
    if (demand == LipschitzDemand::one_lipschitz && w.lipschitz_constant > 1.0 + kLipschitzTolerance) {
        const auto& labels = f.domain().labels();
        throw NotLipschitzError("map is not 1-Lipschitz: ratio " + std::to_string(w.lipschitz_constant) +
                                    " between " + labels[w.worst_u] + " and " + labels[w.worst_v],
                                w.worst_u, w.worst_v, w.lipschitz_constant);
    }
    w.variation = variation(f, p);
    return w;
}

MapTable project_to_lipschitz(const MapTable& f, Rng& rng) {
    const Space& target = f.target();
    const MMSpace& dom = f.domain();
    std::vector<Point> v = values_of(f);
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t sweep = 0; sweep < kProjectionSweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        bool moved = false;
        for (std::size_t x : order) {
            const double ratio = row_ratio(f, v, x, v[x]);
            if (ratio <= 1.0) continue;

            std::vector<Point> atoms;
            std::vector<double> weights;
            for (std::size_t y = 0; y < n; ++y)
                if (y != x && distance(target, v[x], v[y]) > dom.distance(x, y)) {
                    atoms.push_back(v[y]);
                    weights.push_back(dom.prob(y));
                }
            const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            for (double& w : weights) w /= total;
            const Point c = barycenter(DiscreteMeasure(target, atoms, weights)).point;

            Point end = geodesic_point(target, v[x], c, 1.0);
            if (row_feasible(f, v, x, end)) {
                double lo = 0.0, hi = 1.0;
                for (int k = 0; k < kBisectionSteps; ++k) {
                    const double mid = 0.5 * (lo + hi);
                    (row_feasible(f, v, x, geodesic_point(target, v[x], c, mid)) ? hi : lo) = mid;
                }
                v[x] = geodesic_point(target, v[x], c, hi);
                moved = true;
            } else if (row_ratio(f, v, x, end) < ratio) {
                v[x] = std::move(end);
                moved = true;
            }
        }
        if (!moved) break;
    }

    return contract_to_lipschitz(f.with_values(std::move(v)));
}

// Contracting towards any point by 1/L scales all distances by 1/L at most
// (the metric is convex), so this always lands on a 1-Lipschitz map.
MapTable contract_to_lipschitz(const MapTable& f) {
    std::vector<Point> v = values_of(f);
    for (int round = 0; round < 4; ++round) {
        const double lip = max_ratio(f, v);
        if (lip <= 1.0) return f.with_values(std::move(v));
        const Point c = pushforward_barycenter(f, v);
        const double lambda = (1.0 - 1e-12) / lip;
        for (auto& p : v) p = geodesic_point(f.target(), c, p, lambda);
    }
    if (max_ratio(f, v) <= 1.0 + kLipschitzTolerance) return f.with_values(std::move(v));
    const Point c = pushforward_barycenter(f, v);
    return f.with_values(std::vector<Point>(v.size(), c));
}

namespace {

MapTable random_values(const MapTable& shape, Rng& rng) {
    const double diam = shape.domain().diameter();
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    const double spread = diam > 0.0 ? diam * unit(rng) : 1.0;
    std::vector<Point> v;
    v.reserve(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k) v.push_back(sample_point(shape.target(), rng, spread));
    return shape.with_values(std::move(v));
}

}  // namespace

MapTable random_lipschitz_map(const MMSpace& domain, const Space& target, Rng& rng) {
    const MapTable shape(domain, target, std::vector<Point>(domain.size(), target.origin()));
    return project_to_lipschitz(random_values(shape, rng), rng);
}

MapTable random_lipschitz_map(const ProductMMSpace& domain, const Space& target, Rng& rng) {
    const MapTable shape(domain, target, std::vector<Point>(domain.size(), target.origin()));
    return project_to_lipschitz(random_values(shape, rng), rng);
}

/*
 * Along a geodesic ray from f(x), each constraint d(., f(y)) <= D(x, y) cuts
 * out an interval containing 0 (distance to a point is convex on CAT(0)
 * geodesics), and so does their intersection. V_p is convex along the ray
 * too, so the best feasible point is the far end of that interval.
 */
MapTable improve_variation(const MapTable& f, double p, Rng& rng, std::size_t sweeps) {
    const Space& target = f.target();
    const MMSpace& dom = f.domain();
    std::vector<Point> v = values_of(f);
    const std::size_t n = v.size();
    if (n < 2) return f;
    const double reach = 2.0 * dom.diameter();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> current(n);

    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        bool improved = false;
        for (std::size_t x : order) {
            for (int dir = 0; dir < kDirectionsPerSample; ++dir) {
                const Point z = far_point(target, v[x], rng, reach);
                if (distance(target, v[x], z) == 0.0) continue;

                double t = 1.0;
                if (!row_feasible(f, v, x, z)) {
                    double lo = 0.0, hi = 1.0;
                    for (int k = 0; k < kBisectionSteps; ++k) {
                        const double mid = 0.5 * (lo + hi);
                        (row_feasible(f, v, x, geodesic_point(target, v[x], z, mid)) ? lo : hi) = mid;
                    }
                    t = lo;
                }
                if (t == 0.0) continue;
                Point cand = geodesic_point(target, v[x], z, t);
                if (!row_feasible(f, v, x, cand)) continue;

                double gain = 0.0;
                for (std::size_t y = 0; y < n; ++y) {
                    if (y == x) continue;
                    gain += dom.prob(y) * (powp(distance(target, cand, v[y]), p) -
                                           powp(distance(target, v[x], v[y]), p));
                }
                if (gain > 0.0) {
                    v[x] = std::move(cand);
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return f.with_values(std::move(v));
}

ObsVarEstimate obsvar_lower_bound(const MMSpace& x, const Space& target, double p, std::size_t budget,
                                  std::uint64_t seed) {
    if (budget < 1) throw DomainError("obsvar_lower_bound needs budget >= 1");
    if (!(p >= 1.0)) throw DomainError("variation order must be >= 1");
    std::optional<ObsVarEstimate> best;
    for (std::size_t r = 0; r < budget; ++r) {
        Rng rng(derive_seed(seed, 0, r));
        MapTable f = improve_variation(random_lipschitz_map(x, target, rng), p, rng);
        LipschitzWitness w = certify_lipschitz(f, LipschitzDemand::one_lipschitz, p);
        if (!best || w.variation > best->bound) {
            const double b = w.variation;
            best = ObsVarEstimate{b, std::move(w)};
        }
    }
    return std::move(*best);
}

SplitDefect product_split_defect(const MapTable& f, double p) {
    const ProductMMSpace& prod = f.product();
    double ex = 0.0, ex2 = 0.0;
    for (std::size_t i = 0; i < prod.x().size(); ++i) {
        const MapTable s = f.slice_at_x(i);
        ex += prod.x().prob(i) * variation_power(s, p);
        ex2 += prod.x().prob(i) * variation_power(s, 2.0);
    }
    double ey = 0.0, ey2 = 0.0;
    for (std::size_t j = 0; j < prod.y().size(); ++j) {
        const MapTable s = f.slice_at_y(j);
        ey += prod.y().prob(j) * variation_power(s, p);
        ey2 += prod.y().prob(j) * variation_power(s, 2.0);
    }
    return {std::pow(2.0, p - 1.0) * (ex + ey) - variation_power(f, p), ex2 + ey2 - variation_power(f, 2.0)};
}

// ------------------------------------------------------------------ graphs

namespace {

MMSpace graph_mm(const std::vector<std::string>& vertices, const GraphMM::EdgeList& edges) {
    const std::size_t n = vertices.size();
    if (n == 0) throw DomainError("graph needs at least one vertex");
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [u, w] : edges) {
        if (u >= n || w >= n) throw DomainError("graph edge references unknown vertex");
        if (u == w) throw DomainError("graph has a self-loop at " + vertices[u]);
        if (std::find(adj[u].begin(), adj[u].end(), w) != adj[u].end())
            throw DomainError("graph has a repeated edge " + vertices[u] + "-" + vertices[w]);
        adj[u].push_back(w);
        adj[w].push_back(u);
    }
    Eigen::MatrixXd d(n, n);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<long> hops(n, -1);
        hops[s] = 0;
        std::queue<std::size_t> q;
        q.push(s);
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t w : adj[u])
                if (hops[w] < 0) {
                    hops[w] = hops[u] + 1;
                    q.push(w);
                }
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (hops[t] < 0)
                throw DisconnectedGraphError("graph is disconnected: no path from " + vertices[s] + " to " +
                                             vertices[t]);
            d(s, t) = static_cast<double>(hops[t]);
        }
    }
    return MMSpace(vertices, std::move(d), Eigen::VectorXd::Constant(n, 1.0 / n));
}

std::vector<std::string> numbered(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

}  // namespace

GraphMM::GraphMM(std::vector<std::string> vertices, EdgeList edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), mm_(graph_mm(vertices_, edges_)) {}

GraphMM GraphMM::complete(std::size_t n) {
    EdgeList e;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w = u + 1; w < n; ++w) e.emplace_back(u, w);
    return GraphMM(numbered(n), std::move(e));
}

GraphMM GraphMM::cycle(std::size_t n) {
    if (n < 3) throw DomainError("cycle needs at least 3 vertices");
    EdgeList e;
    for (std::size_t u = 0; u < n; ++u) e.emplace_back(u, (u + 1) % n);
    return GraphMM(numbered(n), std::move(e));
}

GraphMM GraphMM::path(std::size_t n) {
    EdgeList e;
    for (std::size_t u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
    return GraphMM(numbered(n), std::move(e));
}

GraphMM GraphMM::hypercube(std::size_t dim) {
    if (dim > 16) throw DomainError("hypercube dimension too large");
    const std::size_t n = std::size_t{1} << dim;
    std::vector<std::string> names;
    for (std::size_t v = 0; v < n; ++v) {
        std::string s(dim, '0');
        for (std::size_t b = 0; b < dim; ++b)
            if (v >> (dim - 1 - b) & 1U) s[b] = '1';
        names.push_back(dim == 0 ? "()" : s);
    }
    EdgeList e;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t b = 0; b < dim; ++b) {
            const std::size_t w = v ^ (std::size_t{1} << b);
            if (v < w) e.emplace_back(v, w);
        }
    return GraphMM(std::move(names), std::move(e));
}

GraphMM GraphMM::random_connected(std::size_t n, double extra, Rng& rng) {
    EdgeList e;
    std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
    for (std::size_t v = 1; v < n; ++v) {
        const std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
        e.emplace_back(u, v);
        used[u][v] = true;
    }
    std::bernoulli_distribution coin(extra);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (!used[u][v] && coin(rng)) e.emplace_back(u, v);
    return GraphMM(numbered(n), std::move(e));
}

Eigen::MatrixXd GraphMM::laplacian() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [u, w] : edges_) {
        const auto a = static_cast<Eigen::Index>(u);
        const auto b = static_cast<Eigen::Index>(w);
        l(a, a) += 1.0;
        l(b, b) += 1.0;
        l(a, b) -= 1.0;
        l(b, a) -= 1.0;
    }
    return l;
}

double graph_gap(const GraphMM& g) {
    if (g.size() < 2) throw DomainError("spectral gap needs at least two vertices");
    const Eigen::MatrixXd l = g.laplacian();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    if (es.info() != Eigen::Success) throw std::runtime_error("laplacian eigen-decomposition failed");
    const double lambda2 = es.eigenvalues()(1);
    const Eigen::VectorXd v = es.eigenvectors().col(1);
    if ((l * v - lambda2 * v).norm() > 1e-8) throw std::runtime_error("laplacian eigenpair residual above 1e-8");
    return static_cast<double>(g.size()) / static_cast<double>(g.edges().size()) * lambda2;
}

SpectralCheck spectral_obsvar_check(const GraphMM& g, const Space& target, std::size_t trials, std::uint64_t seed) {
    if (target.kind() != SpaceKind::euclidean && target.kind() != SpaceKind::hyperboloid)
        throw DomainError("spectral check needs a euclidean or hyperboloid target");
    SpectralCheck out;
    out.lambda1 = graph_gap(g);
    out.bound = 2.0 * std::sqrt(target.dimension() / out.lambda1);
    out.min_slack = out.bound;
    out.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 1, t));
        MapTable f = random_lipschitz_map(g.mm(), target, rng);
        if (t % 4 == 3) f = improve_variation(f, 2.0, rng, 10);
        const LipschitzWitness w = certify_lipschitz(f, LipschitzDemand::one_lipschitz, 2.0);
        out.max_v2 = std::max(out.max_v2, w.variation);
        out.min_slack = std::min(out.min_slack, out.bound - w.variation);
    }
    return out;
}

TreeComparison tree_comparison_check(const MMSpace& x, const Space& tree, std::size_t budget, std::uint64_t seed) {
    if (tree.kind() != SpaceKind::metric_tree) throw DomainError("tree comparison needs a metric tree target");
    TreeComparison out;
    out.line_bound = obsvar_lower_bound(x, Space::euclidean(1), 2.0, budget, seed).bound;
    out.tree_bound = obsvar_lower_bound(x, tree, 2.0, budget, seed).bound;
    out.slack = kTreeLineConstant * out.line_bound * out.line_bound - out.tree_bound * out.tree_bound;
    out.solver_bug = out.slack < -1e-6;
    return out;
}

}  // namespace cat0
