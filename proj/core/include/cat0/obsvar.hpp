#pragma once

// Lower bounds on the observable L^p-variation (sup of V_p over 1-Lipschitz
// maps), product splitting defects, and the graph spectral bound.

#include "cat0/measures.hpp"
#include "cat0/spaces.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cat0 {

/// Slack allowed on the Lipschitz constant of a certified witness.
inline constexpr double kLipschitzTolerance = 1e-9;

class NotLipschitzError : public std::runtime_error {
public:
    NotLipschitzError(const std::string& what, std::size_t u, std::size_t v, double ratio)
        : std::runtime_error(what), pair_(u, v), ratio_(ratio) {}
    std::pair<std::size_t, std::size_t> pair() const { return pair_; }
    double ratio() const { return ratio_; }

private:
    std::pair<std::size_t, std::size_t> pair_;
    double ratio_;
};

struct LipschitzWitness {
    MapTable map;
    double lipschitz_constant = 0.0;
    std::size_t worst_u = npos;  // npos when the domain has one sample
    std::size_t worst_v = npos;
    double p = 2.0;
    double variation = 0.0;
};

enum class LipschitzDemand { report, one_lipschitz };

/// Full pairwise scan. With `one_lipschitz`, throws NotLipschitzError when
/// the constant exceeds 1 + kLipschitzTolerance.
LipschitzWitness certify_lipschitz(const MapTable& f, LipschitzDemand demand = LipschitzDemand::report,
                                   double p = 2.0);

/// Shrinks violating images towards the barycenter of their violators until
/// every pair satisfies d(f(u), f(v)) <= d(u, v), then contracts globally if
/// anything is left over.
MapTable project_to_lipschitz(const MapTable& f, Rng& rng);

/// Global contraction towards the pushforward barycenter by 1/L. One
/// O(n^2) pass; meant for large domains where projection is too slow.
MapTable contract_to_lipschitz(const MapTable& f);

/// Random values (spread ~ domain diameter) projected to 1-Lipschitz.
MapTable random_lipschitz_map(const MMSpace& domain, const Space& target, Rng& rng);
MapTable random_lipschitz_map(const ProductMMSpace& domain, const Space& target, Rng& rng);

/// Coordinate ascent on V_p: each sample's image is pushed along random
/// geodesic directions to the edge of the 1-Lipschitz region.
MapTable improve_variation(const MapTable& f, double p, Rng& rng, std::size_t sweeps = 50);

struct ObsVarEstimate {
    double bound = 0.0;
    LipschitzWitness witness;
};

/// Best V_p over `budget` restarts; restart r has its own seed derived from (seed, r),
/// so a larger budget never lowers the bound.
ObsVarEstimate obsvar_lower_bound(const MMSpace& x, const Space& target, double p, std::size_t budget,
                                  std::uint64_t seed);

struct SplitDefect {
    double convexity = 0.0;  // 2^{p-1}(E_x V_p(f_x)^p + E_y V_p(f^y)^p) - V_p(f)^p
    double sharp = 0.0;  // E_x V_2(f_x)^2 + E_y V_2(f^y)^2 - V_2(f)^2
};

SplitDefect product_split_defect(const MapTable& f, double p);

/*
 * Finite connected simple graph with unit edges, shortest-path metric and
 * uniform measure.
 */
class GraphMM {
public:
    using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

    GraphMM(std::vector<std::string> vertices, EdgeList edges);

    static GraphMM complete(std::size_t n);
    static GraphMM cycle(std::size_t n);
    static GraphMM path(std::size_t n);
    static GraphMM hypercube(std::size_t dim);
    /// Random spanning tree plus each remaining pair with probability `extra`.
    static GraphMM random_connected(std::size_t n, double extra, Rng& rng);

    std::size_t size() const { return vertices_.size(); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const EdgeList& edges() const { return edges_; }
    const MMSpace& mm() const { return mm_; }
    /// Combinatorial Laplacian D - A.
    Eigen::MatrixXd laplacian() const;

private:
    std::vector<std::string> vertices_;
    EdgeList edges_;
    MMSpace mm_;
};

/// lambda_1 = (|V| / |E|) * second-smallest eigenvalue of the Laplacian.
double graph_gap(const GraphMM& g);

struct SpectralCheck {
    double lambda1 = 0.0;
    double bound = 0.0;  // 2 sqrt(n / lambda1)
    double max_v2 = 0.0;
    double min_slack = 0.0;
    std::size_t trials = 0;
};

/// Random 1-Lipschitz maps into a Euclidean or hyperboloid target of
/// dimension n; every fourth one is pushed up by local search.
SpectralCheck spectral_obsvar_check(const GraphMM& g, const Space& target, std::size_t trials,
                                    std::uint64_t seed);

inline const double kTreeLineConstant = 38.0 + 16.0 * 1.4142135623730951;

struct TreeComparison {
    double line_bound = 0.0;
    double tree_bound = 0.0;
    double slack = 0.0;  // C * line^2 - tree^2
    bool solver_bug = false;
};

TreeComparison tree_comparison_check(const MMSpace& x, const Space& tree, std::size_t budget, std::uint64_t seed);

}  // namespace cat0
