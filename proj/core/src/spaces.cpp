#include "cat0/spaces.hpp"

#include "cat0/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <utility>

namespace cat0 {

namespace {

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------- MetricTree

MetricTree::MetricTree(std::vector<std::string> vertex_names, std::vector<Edge> edges)
    : names_(std::move(vertex_names)), edges_(std::move(edges)) {
    const std::size_t n = names_.size();
    if (n == 0) throw DomainError("metric tree needs at least one vertex");
    if (edges_.size() + 1 != n)
        throw DomainError("metric tree with " + std::to_string(n) + " vertices needs " +
                          std::to_string(n - 1) + " edges, got " + std::to_string(edges_.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (names_[i] == names_[j]) throw DomainError("duplicate vertex name '" + names_[i] + "'");

    incident_.assign(n, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.from >= n || ed.to >= n) throw DomainError("edge '" + ed.id + "' references unknown vertex");
        if (ed.from == ed.to) throw DomainError("edge '" + ed.id + "' is a loop");
        if (!(ed.length > 0.0) || !std::isfinite(ed.length))
            throw DomainError("edge '" + ed.id + "' must have positive finite length");
        for (std::size_t f = 0; f < e; ++f)
            if (edges_[f].id == ed.id) throw DomainError("duplicate edge id '" + ed.id + "'");
        incident_[ed.from].push_back(e);
        incident_[ed.to].push_back(e);
    }

    dist_.assign(n * n, -1.0);
    hop_.assign(n * n, npos);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        double* d = &dist_[s * n];
        std::size_t* h = &hop_[s * n];
        d[s] = 0.0;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t e : incident_[u]) {
                const std::size_t w = other_end(e, u);
                if (d[w] >= 0.0) continue;
                d[w] = d[u] + edges_[e].length;
                h[w] = (u == s) ? e : h[u];
                stack.push_back(w);
            }
        }
        for (std::size_t v = 0; v < n; ++v)
            if (d[v] < 0.0) throw DomainError("metric tree is not connected");
    }
}

MetricTree MetricTree::tripod(double leg) {
    return MetricTree({"o", "t1", "t2", "t3"},
                      {{"1", 0, 1, leg}, {"2", 0, 2, leg}, {"3", 0, 3, leg}});
}

std::optional<std::size_t> MetricTree::find_vertex(std::string_view name) const {
    for (std::size_t v = 0; v < names_.size(); ++v)
        if (names_[v] == name) return v;
    return std::nullopt;
}

std::optional<std::size_t> MetricTree::find_edge(std::string_view id) const {
    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].id == id) return e;
    return std::nullopt;
}

std::size_t MetricTree::other_end(std::size_t e, std::size_t v) const {
    const Edge& ed = edges_[e];
    return ed.from == v ? ed.to : ed.from;
}

double MetricTree::total_length() const {
    return std::accumulate(edges_.begin(), edges_.end(), 0.0,
                           [](double acc, const Edge& e) { return acc + e.length; });
}

bool operator==(const MetricTree& a, const MetricTree& b) {
    if (&a == &b) return true;
    if (a.names_.size() != b.names_.size() || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t e = 0; e < a.edges_.size(); ++e) {
        const auto& x = a.edges_[e];
        const auto& y = b.edges_[e];
        if (x.from != y.from || x.to != y.to || x.length != y.length) return false;
    }
    return true;
}

// --------------------------------------------------------------------- Point

const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::euclidean: return "euclidean";
        case SpaceKind::metric_tree: return "tree";
        case SpaceKind::hyperboloid: return "hyperboloid";
        case SpaceKind::product: return "product";
    }
    return "?";
}

Point Point::euclidean(Eigen::VectorXd x) { return Point(EuclideanCoords{std::move(x)}); }
Point Point::hyperboloid(Eigen::VectorXd x) { return Point(HyperboloidCoords{std::move(x)}); }
Point Point::tree_vertex(std::size_t v) { return Point(TreeCoords{v, npos, 0.0}); }
Point Point::product(std::vector<Point> parts) { return Point(ProductCoords{std::move(parts)}); }

SpaceKind Point::kind() const {
    switch (coords_.index()) {
        case 0: return SpaceKind::euclidean;
        case 1: return SpaceKind::metric_tree;
        case 2: return SpaceKind::hyperboloid;
        default: return SpaceKind::product;
    }
}

const Eigen::VectorXd& Point::vector() const {
    if (auto* e = std::get_if<EuclideanCoords>(&coords_)) return e->x;
    if (auto* h = std::get_if<HyperboloidCoords>(&coords_)) return h->x;
    throw DomainError("point has no vector coordinates");
}

const TreeCoords& Point::tree() const {
    if (auto* t = std::get_if<TreeCoords>(&coords_)) return *t;
    throw DomainError("point is not a tree point");
}

const std::vector<Point>& Point::parts() const {
    if (auto* p = std::get_if<ProductCoords>(&coords_)) return p->parts;
    throw DomainError("point is not a product point");
}

bool operator==(const Point& a, const Point& b) {
    if (a.coords_.index() != b.coords_.index()) return false;
    switch (a.coords_.index()) {
        case 0:
        case 2: {
            const auto& x = a.vector();
            const auto& y = b.vector();
            return x.size() == y.size() && x == y;
        }
        case 1: {
            const auto& s = a.tree();
            const auto& t = b.tree();
            return s.vertex == t.vertex && s.edge == t.edge && s.offset == t.offset;
        }
        default: return a.parts() == b.parts();
    }
}

// --------------------------------------------------------------------- Space

Space Space::euclidean(int dim) {
    if (dim < 1) throw DomainError("euclidean dimension must be >= 1");
    return Space(std::make_shared<const Data>(Data{SpaceKind::euclidean, dim, nullptr, {}}));
}

Space Space::hyperboloid(int dim) {
    if (dim < 1) throw DomainError("hyperboloid dimension must be >= 1");
    return Space(std::make_shared<const Data>(Data{SpaceKind::hyperboloid, dim, nullptr, {}}));
}

Space Space::metric_tree(MetricTree tree) {
    return Space(std::make_shared<const Data>(
        Data{SpaceKind::metric_tree, 0, std::make_shared<const MetricTree>(std::move(tree)), {}}));
}

Space Space::product(std::vector<Space> components) {
    if (components.size() < 2) throw DomainError("product space needs at least two components");
    return Space(std::make_shared<const Data>(Data{SpaceKind::product, 0, nullptr, std::move(components)}));
}

const MetricTree& Space::tree() const {
    if (!data_->tree) throw DomainError("space is not a metric tree");
    return *data_->tree;
}

bool Space::has_tangent_maps() const {
    switch (kind()) {
        case SpaceKind::euclidean:
        case SpaceKind::hyperboloid: return true;
        case SpaceKind::metric_tree: return false;
        case SpaceKind::product:
            return std::all_of(data_->parts.begin(), data_->parts.end(),
                               [](const Space& s) { return s.has_tangent_maps(); });
    }
    return false;
}

int Space::tangent_dimension() const {
    switch (kind()) {
        case SpaceKind::euclidean: return dimension();
        case SpaceKind::hyperboloid: return dimension() + 1;
        case SpaceKind::metric_tree: throw UnsupportedSpaceError("metric trees have no tangent maps");
        case SpaceKind::product: {
            int total = 0;
            for (const auto& s : data_->parts) total += s.tangent_dimension();
            return total;
        }
    }
    return 0;
}

void Space::check(const Point& p) const {
    if (p.kind() != kind())
        throw DomainError(std::string("point of kind ") + to_string(p.kind()) + " used in " + describe());
    switch (kind()) {
        case SpaceKind::euclidean:
            if (p.vector().size() != dimension()) throw DomainError("euclidean point has wrong dimension");
            break;
        case SpaceKind::hyperboloid:
            if (p.vector().size() != dimension() + 1) throw DomainError("hyperboloid point has wrong dimension");
            break;
        case SpaceKind::metric_tree: {
            const auto& t = p.tree();
            const auto& tr = tree();
            if (t.at_vertex()) {
                if (t.vertex >= tr.vertex_count()) throw DomainError("tree vertex out of range");
            } else if (t.edge >= tr.edge_count() || !(t.offset > 0.0) || !(t.offset < tr.edge(t.edge).length)) {
                throw DomainError("tree point off its edge");
            }
            break;
        }
        case SpaceKind::product: {
            const auto& parts = p.parts();
            if (parts.size() != data_->parts.size()) throw DomainError("product point has wrong arity");
            for (std::size_t i = 0; i < parts.size(); ++i) data_->parts[i].check(parts[i]);
            break;
        }
    }
}

bool Space::contains(const Point& p) const {
    try {
        check(p);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

Point Space::origin() const {
    switch (kind()) {
        case SpaceKind::euclidean: return Point::euclidean(Eigen::VectorXd::Zero(dimension()));
        case SpaceKind::hyperboloid: return Point::hyperboloid(Eigen::VectorXd::Unit(dimension() + 1, 0));
        case SpaceKind::metric_tree: return Point::tree_vertex(0);
        case SpaceKind::product: {
            std::vector<Point> parts;
            for (const auto& s : data_->parts) parts.push_back(s.origin());
            return Point::product(std::move(parts));
        }
    }
    return {};
}

Point Space::tree_point(std::size_t edge, double offset) const {
    const auto& tr = tree();
    if (edge >= tr.edge_count()) throw DomainError("tree edge index out of range");
    const auto& ed = tr.edge(edge);
    if (!(offset >= 0.0) || !(offset <= ed.length))
        throw DomainError("offset " + fmt_num(offset) + " outside edge '" + ed.id + "'");
    if (offset == 0.0) return Point::tree_vertex(ed.from);
    if (offset == ed.length) return Point::tree_vertex(ed.to);
    return Point(TreeCoords{npos, edge, offset});
}

Point Space::hyperboloid_point(Eigen::VectorXd x) const {
    if (kind() != SpaceKind::hyperboloid) throw DomainError("space is not a hyperboloid");
    if (x.size() != dimension() + 1) throw DomainError("hyperboloid point has wrong dimension");
    x(0) = std::sqrt(1.0 + x.tail(dimension()).squaredNorm());
    return Point::hyperboloid(std::move(x));
}

std::string Space::describe() const {
    switch (kind()) {
        case SpaceKind::euclidean: return "R^" + std::to_string(dimension());
        case SpaceKind::hyperboloid: return "H^" + std::to_string(dimension());
        case SpaceKind::metric_tree:
            return "tree(" + std::to_string(tree().vertex_count()) + " vertices)";
        case SpaceKind::product: {
            std::string s;
            for (const auto& c : data_->parts) s += (s.empty() ? "" : " x ") + c.describe();
            return s;
        }
    }
    return "?";
}

bool operator==(const Space& a, const Space& b) {
    if (a.data_ == b.data_) return true;
    if (a.kind() != b.kind() || a.dimension() != b.dimension()) return false;
    switch (a.kind()) {
        case SpaceKind::metric_tree: return a.tree() == b.tree();
        case SpaceKind::product: return a.data_->parts == b.data_->parts;
        default: return true;
    }
}

// ------------------------------------------------------------------ geometry

double minkowski(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return -x(0) * y(0) + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

namespace {

struct Anchor {
    std::size_t vertex;
    double dist;
};

// End vertices through which a geodesic may leave p, with distances.
std::size_t anchors(const MetricTree& tree, const TreeCoords& p, std::array<Anchor, 2>& out) {
    if (p.at_vertex()) {
        out[0] = {p.vertex, 0.0};
        return 1;
    }
    const auto& ed = tree.edge(p.edge);
    out[0] = {ed.from, p.offset};
    out[1] = {ed.to, ed.length - p.offset};
    return 2;
}

struct TreeRoute {
    Anchor exit;   // p leaves through exit.vertex
    Anchor entry;  // q is reached from entry.vertex
    double length;
};

TreeRoute tree_route(const MetricTree& tree, const TreeCoords& p, const TreeCoords& q) {
    std::array<Anchor, 2> ap{}, aq{};
    const std::size_t np = anchors(tree, p, ap);
    const std::size_t nq = anchors(tree, q, aq);
    TreeRoute best{ap[0], aq[0], std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nq; ++j) {
            const double len = ap[i].dist + tree.vertex_distance(ap[i].vertex, aq[j].vertex) + aq[j].dist;
            if (len < best.length) best = {ap[i], aq[j], len};
        }
    return best;
}

double tree_distance(const MetricTree& tree, const TreeCoords& p, const TreeCoords& q) {
    if (!p.at_vertex() && p.edge == q.edge) return std::abs(p.offset - q.offset);
    return tree_route(tree, p, q).length;
}

/*
 * Hyperboloid arithmetic runs in long double. Far from the origin ambient
 * coordinates grow like e^r, and the double-precision formulas lose
 * several digits to cancellation there. Tangent vectors are handled through
 * their spatial part only; the time component is implied by tangency.
 */
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

long double lminkowski(const LVec& x, const LVec& y) {
    return -x(0) * y(0) + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

// The spatial coordinates are authoritative: x0 is recomputed in long
// double, since the stored double x0 alone is off the sheet by ~x0 * eps.
LVec lift(const Eigen::VectorXd& xd) {
    LVec x = xd.cast<long double>();
    x(0) = std::sqrt(1.0L + x.tail(x.size() - 1).squaredNorm());
    return x;
}

Eigen::VectorXd to_sheet(LVec y) {
    y(0) = std::sqrt(1.0L + y.tail(y.size() - 1).squaredNorm());
    return y.cast<double>();
}

long double hyp_distance(const LVec& x, const LVec& y) {
    const long double c = -lminkowski(x, y);
    if (c > 1.5L) return std::acosh(c);
    // Near the diagonal acosh loses half the digits; the chord form does
    // not, provided x0 - y0 is formed without cancellation.
    const auto n = x.size() - 1;
    const LVec xs = x.tail(n), ys = y.tail(n);
    const long double du0 = (xs - ys).dot(xs + ys) / (x(0) + y(0));
    const long double q = std::max((xs - ys).squaredNorm() - du0 * du0, 0.0L);
    return 2.0L * std::asinh(0.5L * std::sqrt(q));
}

// |v|_x from the spatial part: split v_s along and across x_s, so that
// |v|^2 = |v_perp|^2 + v_par^2 / x0^2 with no subtraction of large terms.
long double hyp_tangent_norm(const LVec& x, const LVec& v) {
    const auto n = x.size() - 1;
    const LVec xs = x.tail(n), vs = v.tail(n);
    const long double r = xs.norm();
    if (r == 0.0L) return vs.norm();
    const LVec unit = xs / r;
    const long double par = unit.dot(vs);
    const long double perp2 = (vs - par * unit).squaredNorm();
    return std::sqrt(perp2 + par * par / (x(0) * x(0)));
}

LVec hyp_complete_tangent(const LVec& x, LVec v) {
    v(0) = x.tail(x.size() - 1).dot(v.tail(v.size() - 1)) / x(0);
    return v;
}

double hyperboloid_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return static_cast<double>(hyp_distance(lift(x), lift(y)));
}

Eigen::VectorXd hyperboloid_log(const Eigen::VectorXd& xd, const Eigen::VectorXd& yd) {
    const LVec x = lift(xd), y = lift(yd);
    const long double d = hyp_distance(x, y);
    if (d == 0.0L) return Eigen::VectorXd::Zero(x.size());
    // y - cosh(d) x, written so that nearby points do not cancel.
    const long double h = std::sinh(0.5L * d);
    const LVec w = (y - x) - (2.0L * h * h) * x;
    return hyp_complete_tangent(x, (d / std::sinh(d)) * w).cast<double>();
}

Eigen::VectorXd hyperboloid_exp(const Eigen::VectorXd& xd, const Eigen::VectorXd& vd) {
    const LVec x = lift(xd), v = hyp_complete_tangent(x, vd.cast<long double>());
    const long double n = hyp_tangent_norm(x, v);
    if (n == 0.0L) return xd;
    return to_sheet(std::cosh(n) * x + (std::sinh(n) / n) * v);
}

double hyperboloid_tangent_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    return static_cast<double>(hyp_tangent_norm(lift(x), v.cast<long double>()));
}

Eigen::VectorXd hyperboloid_geodesic(const Eigen::VectorXd& xd, const Eigen::VectorXd& yd, double t) {
    const LVec x = lift(xd), y = lift(yd);
    const long double d = hyp_distance(x, y);
    if (d == 0.0L) return xd;
    const long double lt = t;
    long double a = 1.0L - lt, b = lt;
    if (d > 1e-9L) {
        a = std::sinh((1.0L - lt) * d) / std::sinh(d);
        b = std::sinh(lt * d) / std::sinh(d);
    }
    return to_sheet(a * x + b * y);
}

Point tree_geodesic(const Space& space, const Point& p, const Point& q, double t) {
    const MetricTree& tree = space.tree();
    const TreeCoords& a = p.tree();
    const TreeCoords& b = q.tree();
    if (!a.at_vertex() && a.edge == b.edge)
        return space.tree_point(a.edge, a.offset + t * (b.offset - a.offset));

    const TreeRoute route = tree_route(tree, a, b);
    double s = t * route.length;

    if (s < route.exit.dist) {
        const auto& ed = tree.edge(a.edge);
        const double off = (route.exit.vertex == ed.from) ? a.offset - s : a.offset + s;
        return space.tree_point(a.edge, std::clamp(off, 0.0, ed.length));
    }
    s -= route.exit.dist;

    std::size_t u = route.exit.vertex;
    while (u != route.entry.vertex) {
        const std::size_t e = tree.next_edge(u, route.entry.vertex);
        const auto& ed = tree.edge(e);
        if (s < ed.length) {
            const double off = (u == ed.from) ? s : ed.length - s;
            return space.tree_point(e, std::clamp(off, 0.0, ed.length));
        }
        s -= ed.length;
        u = tree.other_end(e, u);
    }

    if (b.at_vertex()) return q;
    const auto& ed = tree.edge(b.edge);
    const double off = (u == ed.from) ? s : ed.length - s;
    return space.tree_point(b.edge, std::clamp(off, 0.0, ed.length));
}

}  // namespace

double distance(const Space& space, const Point& p, const Point& q) {
    space.check(p);
    space.check(q);
    switch (space.kind()) {
        case SpaceKind::euclidean: return (p.vector() - q.vector()).norm();
        case SpaceKind::hyperboloid: return hyperboloid_distance(p.vector(), q.vector());
        case SpaceKind::metric_tree: return tree_distance(space.tree(), p.tree(), q.tree());
        case SpaceKind::product: {
            double sq = 0.0;
            const auto comps = space.components();
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const double d = distance(comps[i], p.parts()[i], q.parts()[i]);
                sq += d * d;
            }
            return std::sqrt(sq);
        }
    }
    return 0.0;
}

Point geodesic_point(const Space& space, const Point& p, const Point& q, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter must lie in [0,1]");
    space.check(p);
    space.check(q);
    if (t == 0.0) return p;
    if (t == 1.0) return q;
    switch (space.kind()) {
        case SpaceKind::euclidean: return Point::euclidean(p.vector() + t * (q.vector() - p.vector()));
        case SpaceKind::hyperboloid:
            return Point::hyperboloid(hyperboloid_geodesic(p.vector(), q.vector(), t));
        case SpaceKind::metric_tree: return tree_geodesic(space, p, q, t);
        case SpaceKind::product: {
            std::vector<Point> parts;
            const auto comps = space.components();
            for (std::size_t i = 0; i < comps.size(); ++i)
                parts.push_back(geodesic_point(comps[i], p.parts()[i], q.parts()[i], t));
            return Point::product(std::move(parts));
        }
    }
    return p;
}

TangentVector log_map(const Space& space, const Point& base, const Point& target) {
    if (!space.has_tangent_maps()) throw UnsupportedSpaceError("log_map is undefined on " + space.describe());
    space.check(base);
    space.check(target);
    switch (space.kind()) {
        case SpaceKind::euclidean: return {base, target.vector() - base.vector()};
        case SpaceKind::hyperboloid: return {base, hyperboloid_log(base.vector(), target.vector())};
        default: break;
    }
    Eigen::VectorXd coeffs(space.tangent_dimension());
    Eigen::Index at = 0;
    const auto comps = space.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto v = log_map(comps[i], base.parts()[i], target.parts()[i]);
        coeffs.segment(at, v.coeffs.size()) = v.coeffs;
        at += v.coeffs.size();
    }
    return {base, std::move(coeffs)};
}

Point exp_map(const Space& space, const TangentVector& v) {
    if (!space.has_tangent_maps()) throw UnsupportedSpaceError("exp_map is undefined on " + space.describe());
    space.check(v.base);
    if (v.coeffs.size() != space.tangent_dimension()) throw DomainError("tangent vector has wrong dimension");
    switch (space.kind()) {
        case SpaceKind::euclidean: return Point::euclidean(v.base.vector() + v.coeffs);
        case SpaceKind::hyperboloid: return Point::hyperboloid(hyperboloid_exp(v.base.vector(), v.coeffs));
        default: break;
    }
    std::vector<Point> parts;
    Eigen::Index at = 0;
    const auto comps = space.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const int k = comps[i].tangent_dimension();
        parts.push_back(exp_map(comps[i], {v.base.parts()[i], v.coeffs.segment(at, k)}));
        at += k;
    }
    return Point::product(std::move(parts));
}

double tangent_norm(const Space& space, const TangentVector& v) {
    switch (space.kind()) {
        case SpaceKind::euclidean: return v.coeffs.norm();
        case SpaceKind::hyperboloid: return hyperboloid_tangent_norm(v.base.vector(), v.coeffs);
        case SpaceKind::metric_tree: throw UnsupportedSpaceError("metric trees have no tangent vectors");
        case SpaceKind::product: break;
    }
    double sq = 0.0;
    Eigen::Index at = 0;
    const auto comps = space.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const int k = comps[i].tangent_dimension();
        const double n = tangent_norm(comps[i], {v.base.parts()[i], v.coeffs.segment(at, k)});
        sq += n * n;
        at += k;
    }
    return std::sqrt(sq);
}

double cat0_midpoint_defect(const Space& space, const Point& x, const Point& y, const Point& z) {
    const double dxy = distance(space, x, y);
    const double dxz = distance(space, x, z);
    const double dyz = distance(space, y, z);
    const double dxm = distance(space, x, geodesic_point(space, y, z, 0.5));
    return 0.5 * dxy * dxy + 0.5 * dxz * dxz - 0.25 * dyz * dyz - dxm * dxm;
}

double reshetnyak_defect(const Space& space, const Point& x1, const Point& x2, const Point& x3,
                         const Point& x4) {
    auto sq = [&](const Point& a, const Point& b) {
        const double d = distance(space, a, b);
        return d * d;
    };
    return sq(x1, x2) + sq(x2, x3) + sq(x3, x4) + sq(x4, x1) - sq(x1, x3) - sq(x2, x4);
}

Point sample_point(const Space& space, Rng& rng, double spread) {
    std::normal_distribution<double> gauss(0.0, spread);
    switch (space.kind()) {
        case SpaceKind::euclidean: {
            Eigen::VectorXd x(space.dimension());
            for (auto& c : x) c = gauss(rng);
            return Point::euclidean(std::move(x));
        }
        case SpaceKind::hyperboloid: {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(space.dimension() + 1);
            for (int i = 1; i <= space.dimension(); ++i) v(i) = gauss(rng);
            return exp_map(space, {space.origin(), std::move(v)});
        }
        case SpaceKind::metric_tree: {
            const auto& tree = space.tree();
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            if (tree.edge_count() == 0 || unit(rng) < 0.2) {
                std::uniform_int_distribution<std::size_t> pick(0, tree.vertex_count() - 1);
                return Point::tree_vertex(pick(rng));
            }
            std::uniform_int_distribution<std::size_t> pick(0, tree.edge_count() - 1);
            const std::size_t e = pick(rng);
            return space.tree_point(e, unit(rng) * tree.edge(e).length);
        }
        case SpaceKind::product: {
            std::vector<Point> parts;
            for (const auto& c : space.components()) parts.push_back(sample_point(c, rng, spread));
            return Point::product(std::move(parts));
        }
    }
    return space.origin();
}

Point sample_near(const Space& space, const Point& center, Rng& rng, double scale) {
    space.check(center);
    std::normal_distribution<double> gauss(0.0, scale);
    switch (space.kind()) {
        case SpaceKind::euclidean: {
            Eigen::VectorXd x = center.vector();
            for (auto& c : x) c += gauss(rng);
            return Point::euclidean(std::move(x));
        }
        case SpaceKind::hyperboloid: {
            const Eigen::VectorXd& x = center.vector();
            Eigen::VectorXd v(x.size());
            for (auto& c : v) c = gauss(rng);
            const double n = hyperboloid_tangent_norm(x, v);
            if (n == 0.0) return center;
            v *= std::abs(gauss(rng)) * std::sqrt(static_cast<double>(space.dimension())) / n;
            return exp_map(space, {center, std::move(v)});
        }
        case SpaceKind::metric_tree: {
            const Point z = sample_point(space, rng, scale);
            const double d = distance(space, center, z);
            if (d == 0.0) return z;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            return geodesic_point(space, center, z, std::min(1.0, unit(rng) * 2.0 * scale / d));
        }
        case SpaceKind::product: {
            std::vector<Point> parts;
            const auto comps = space.components();
            for (std::size_t i = 0; i < comps.size(); ++i)
                parts.push_back(sample_near(comps[i], center.parts()[i], rng, scale));
            return Point::product(std::move(parts));
        }
    }
    return center;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

MetricTree random_tree(std::size_t vertices, Rng& rng) {
    if (vertices == 0) throw DomainError("random_tree needs at least one vertex");
    std::vector<std::string> names;
    std::vector<MetricTree::Edge> edges;
    std::uniform_real_distribution<double> len(0.25, 1.5);
    for (std::size_t v = 0; v < vertices; ++v) {
        names.push_back("v" + std::to_string(v));
        if (v > 0) {
            std::uniform_int_distribution<std::size_t> parent(0, v - 1);
            const std::size_t p = parent(rng);
            edges.push_back({"e" + std::to_string(v), p, v, len(rng)});
        }
    }
    return MetricTree(std::move(names), std::move(edges));
}

std::string format_point(const Space& space, const Point& p) {
    std::ostringstream out;
    switch (space.kind()) {
        case SpaceKind::euclidean:
        case SpaceKind::hyperboloid: {
            out << '(';
            for (Eigen::Index i = 0; i < p.vector().size(); ++i) out << (i ? ", " : "") << fmt_num(p.vector()(i));
            out << ')';
            break;
        }
        case SpaceKind::metric_tree: {
            const auto& t = p.tree();
            if (t.at_vertex())
                out << space.tree().vertex_name(t.vertex);
            else
                out << '[' << space.tree().edge(t.edge).id << ", " << fmt_num(t.offset) << ']';
            break;
        }
        case SpaceKind::product: {
            out << '(';
            const auto comps = space.components();
            for (std::size_t i = 0; i < comps.size(); ++i)
                out << (i ? ", " : "") << format_point(comps[i], p.parts()[i]);
            out << ')';
            break;
        }
    }
    return out.str();
}

}  // namespace cat0
