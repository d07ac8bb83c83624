#pragma once

// Concrete CAT(0) target spaces: Euclidean space, finite metric trees, the
// hyperboloid model of hyperbolic space (curvature -1), and l2 products.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cat0 {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

/*
 * Finite metric tree: a connected acyclic graph with positive edge lengths,
 * viewed as the geodesic space obtained by gluing segments. All vertex-to-vertex
 * distances and first hops are tabulated at construction (O(V^2) storage).
 */
class MetricTree {
public:
    struct Edge {
        std::string id;
        std::size_t from;
        std::size_t to;
        double length;
    };

    MetricTree(std::vector<std::string> vertex_names, std::vector<Edge> edges);

    /// Three legs of length `leg` glued at vertex "o". Leg i is edge "i"
    /// running from "o" to the tip "t<i>".
    static MetricTree tripod(double leg = 1.0);

    std::size_t vertex_count() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::string& vertex_name(std::size_t v) const { return names_.at(v); }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const std::size_t> incident_edges(std::size_t v) const { return incident_.at(v); }
    std::optional<std::size_t> find_vertex(std::string_view name) const;
    std::optional<std::size_t> find_edge(std::string_view id) const;

    double vertex_distance(std::size_t u, std::size_t v) const {
        return dist_[u * names_.size() + v];
    }
    /// Edge leaving `u` on the path towards `v`; npos when u == v.
    std::size_t next_edge(std::size_t u, std::size_t v) const {
        return hop_[u * names_.size() + v];
    }
    std::size_t other_end(std::size_t e, std::size_t v) const;
    double total_length() const;

    friend bool operator==(const MetricTree& a, const MetricTree& b);

private:
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<double> dist_;
    std::vector<std::size_t> hop_;
};

class Point;

struct EuclideanCoords {
    Eigen::VectorXd x;
};

// Ambient coordinates in R^{d+1}; <x,x>_M = -1 and x_0 > 0.
struct HyperboloidCoords {
    Eigen::VectorXd x;
};

// Canonical tree position: a vertex (edge == npos) or a point strictly
// inside an edge, with offset measured from the edge's `from` vertex.
struct TreeCoords {
    std::size_t vertex = npos;
    std::size_t edge = npos;
    double offset = 0.0;

    bool at_vertex() const { return edge == npos; }
};

struct ProductCoords {
    std::vector<Point> parts;
};

enum class SpaceKind { euclidean, metric_tree, hyperboloid, product };

const char* to_string(SpaceKind kind);

class Point {
public:
    using Coords = std::variant<EuclideanCoords, TreeCoords, HyperboloidCoords, ProductCoords>;

    Point() = default;

    static Point euclidean(Eigen::VectorXd x);
    /// No normalization; use Space::hyperboloid_point for raw input.
    static Point hyperboloid(Eigen::VectorXd x);
    static Point tree_vertex(std::size_t v);
    static Point product(std::vector<Point> parts);

    SpaceKind kind() const;
    const Coords& coords() const { return coords_; }

    const Eigen::VectorXd& vector() const;  // euclidean or hyperboloid
    const TreeCoords& tree() const;
    const std::vector<Point>& parts() const;

    friend bool operator==(const Point& a, const Point& b);

private:
    explicit Point(Coords c) : coords_(std::move(c)) {}
    friend class Space;

    Coords coords_{EuclideanCoords{}};
};

/*
 * Geodesic metric space descriptor. Immutable; copies share state.
 */
class Space {
public:
    static Space euclidean(int dim);
    static Space hyperboloid(int dim);
    static Space metric_tree(MetricTree tree);
    static Space product(std::vector<Space> components);

    SpaceKind kind() const { return data_->kind; }
    /// Euclidean/hyperboloid dimension; 0 for trees and products.
    int dimension() const { return data_->dim; }
    const MetricTree& tree() const;
    std::span<const Space> components() const { return data_->parts; }

    /// Euclidean, hyperboloid, or a product of those.
    bool has_tangent_maps() const;
    /// Length of TangentVector::coeffs for this space.
    int tangent_dimension() const;

    /// Throws DomainError if `p` does not belong to this space.
    void check(const Point& p) const;
    bool contains(const Point& p) const;

    /// Zero vector, (1,0,...,0), tree vertex 0, or the tuple of those.
    Point origin() const;
    /// Canonicalizes: offsets 0 and length map to the edge's end vertices.
    Point tree_point(std::size_t edge, double offset) const;
    /// Projects ambient coordinates onto the sheet by recomputing x_0.
    Point hyperboloid_point(Eigen::VectorXd x) const;

    std::string describe() const;

    friend bool operator==(const Space& a, const Space& b);

private:
    struct Data {
        SpaceKind kind;
        int dim = 0;
        std::shared_ptr<const MetricTree> tree;
        std::vector<Space> parts;
    };
    explicit Space(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

    std::shared_ptr<const Data> data_;
};

struct TangentVector {
    Point base;
    Eigen::VectorXd coeffs;
};

double minkowski(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double distance(const Space& space, const Point& p, const Point& q);

/// Constant-speed geodesic from p (t = 0) to q (t = 1).
Point geodesic_point(const Space& space, const Point& p, const Point& q, double t);

TangentVector log_map(const Space& space, const Point& base, const Point& target);
Point exp_map(const Space& space, const TangentVector& v);
double tangent_norm(const Space& space, const TangentVector& v);

/// RHS - LHS of the CAT(0) midpoint comparison for x against the geodesic y -> z.
double cat0_midpoint_defect(const Space& space, const Point& x, const Point& y, const Point& z);

/// Cyclic side squares minus diagonal squares for the quadrilateral x1 x2 x3 x4.
double reshetnyak_defect(const Space& space, const Point& x1, const Point& x2, const Point& x3,
                         const Point& x4);

using Rng = std::mt19937_64;

/// Random point: Gaussian for Euclidean, exp of a Gaussian tangent at the
/// origin for the hyperboloid, random edge and offset (sometimes a vertex)
/// for trees, componentwise for products.
Point sample_point(const Space& space, Rng& rng, double spread = 1.0);

/// Random point near `center`: a Gaussian step of size ~`scale` for vector
/// spaces, a point part-way towards a uniform random point for trees.
Point sample_near(const Space& space, const Point& center, Rng& rng, double scale);

/// Independent stream seed for instance `index` of stream `stream`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

/// Random recursive tree on `vertices` vertices, edge lengths in [0.25, 1.5).
MetricTree random_tree(std::size_t vertices, Rng& rng);

/// Human-readable coordinates; tree points print as a vertex name or
/// [edge_id, offset].
std::string format_point(const Space& space, const Point& p);

}  // namespace cat0
