#include "cat0/scenario.hpp"

#include "cat0/errors.hpp"
#include "cat0/suites.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cat0 {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ValidationError(path, msg); }

std::string at_key(const std::string& base, const std::string& key) {
    const bool plain = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
    return plain ? base + "." + key : base + "[\"" + key + "\"]";
}

std::string at_index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
}

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void expect_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "number must be finite");
    return v;
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
    expect_array(j, path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(text(j[i], at_index(path, i)));
    return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            fail(at_key(path, it.key()), "unknown field");
}

Eigen::VectorXd number_vector(const json& j, const std::string& path) {
    expect_array(j, path);
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], at_index(path, i));
    return v;
}

// ------------------------------------------------------------------ points

Point point_from_json(const Space& space, const json& j, const std::string& path) {
    switch (space.kind()) {
        case SpaceKind::euclidean: {
            Eigen::VectorXd x = number_vector(j, path);
            if (x.size() != space.dimension())
                fail(path, "expected " + std::to_string(space.dimension()) + " coordinates");
            return Point::euclidean(std::move(x));
        }
        case SpaceKind::hyperboloid: {
            const Eigen::VectorXd x = number_vector(j, path);
            const auto d = static_cast<Eigen::Index>(space.dimension());
            if (x.size() == d) {
                Eigen::VectorXd full(d + 1);
                full(0) = 0.0;
                full.tail(d) = x;
                return space.hyperboloid_point(std::move(full));
            }
            if (x.size() == d + 1) {
                if (!(x(0) > 0.0) || std::abs(minkowski(x, x) + 1.0) > 1e-9 * (1.0 + x(0) * x(0)))
                    fail(path, "ambient coordinates are not on the upper sheet <x,x> = -1");
                return space.hyperboloid_point(x);
            }
            fail(path, "expected " + std::to_string(d) + " spatial or " + std::to_string(d + 1) +
                           " ambient coordinates");
        }
        case SpaceKind::metric_tree: {
            const MetricTree& tree = space.tree();
            if (j.is_string()) {
                const auto v = tree.find_vertex(j.get<std::string>());
                if (!v) fail(path, "unknown tree vertex '" + j.get<std::string>() + "'");
                return Point::tree_vertex(*v);
            }
            if (!j.is_array() || j.size() != 2) fail(path, "expected a vertex name or [\"edge_id\", offset]");
            const std::string id = text(j[0], at_index(path, 0));
            const auto e = tree.find_edge(id);
            if (!e) fail(at_index(path, 0), "unknown tree edge '" + id + "'");
            const double offset = number(j[1], at_index(path, 1));
            if (offset < 0.0 || offset > tree.edge(*e).length)
                fail(at_index(path, 1), "offset outside [0, length of edge '" + id + "']");
            return space.tree_point(*e, offset);
        }
        case SpaceKind::product: {
            const auto comps = space.components();
            expect_array(j, path);
            if (j.size() != comps.size())
                fail(path, "expected " + std::to_string(comps.size()) + " component points");
            std::vector<Point> parts;
            for (std::size_t i = 0; i < comps.size(); ++i)
                parts.push_back(point_from_json(comps[i], j[i], at_index(path, i)));
            return Point::product(std::move(parts));
        }
    }
    fail(path, "unsupported space");
}

// ------------------------------------------------------------------ spaces

MetricTree tree_from_json(const json& j, const std::string& path) {
    if (j.contains("preset")) {
        reject_unknown(j, {"kind", "preset", "leg"}, path);
        const std::string preset = text(j["preset"], at_key(path, "preset"));
        if (preset != "tripod") fail(at_key(path, "preset"), "unknown tree preset '" + preset + "'");
        const double leg = j.contains("leg") ? number(j["leg"], at_key(path, "leg")) : 1.0;
        if (!(leg > 0.0)) fail(at_key(path, "leg"), "leg length must be positive");
        return MetricTree::tripod(leg);
    }
    reject_unknown(j, {"kind", "vertices", "edges"}, path);
    const auto names = string_list(field(j, "vertices", path), at_key(path, "vertices"));
    auto vertex = [&](const json& v, const std::string& p) {
        const std::string name = text(v, p);
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) fail(p, "unknown vertex '" + name + "'");
        return static_cast<std::size_t>(it - names.begin());
    };
    const std::string epath = at_key(path, "edges");
    const json& edges = field(j, "edges", path);
    expect_array(edges, epath);
    std::vector<MetricTree::Edge> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string p = at_index(epath, i);
        const json& e = edges[i];
        if (e.is_array()) {
            if (e.size() != 4) fail(p, "expected [id, from, to, length]");
            out.push_back({text(e[0], at_index(p, 0)), vertex(e[1], at_index(p, 1)), vertex(e[2], at_index(p, 2)),
                           number(e[3], at_index(p, 3))});
        } else {
            expect_object(e, p);
            reject_unknown(e, {"id", "from", "to", "length"}, p);
            out.push_back({text(field(e, "id", p), at_key(p, "id")), vertex(field(e, "from", p), at_key(p, "from")),
                           vertex(field(e, "to", p), at_key(p, "to")),
                           number(field(e, "length", p), at_key(p, "length"))});
        }
    }
    try {
        return MetricTree(names, std::move(out));
    } catch (const DomainError& err) {
        fail(path, err.what());
    }
}

int dimension_of(const json& j, const std::string& path) {
    const std::size_t d = count(field(j, "dim", path), at_key(path, "dim"));
    if (d < 1 || d > 4096) fail(at_key(path, "dim"), "dimension must be between 1 and 4096");
    return static_cast<int>(d);
}

class SpaceResolver {
public:
    explicit SpaceResolver(const json& defs) : defs_(defs) {}

    Space named(const std::string& name, const std::string& ref_path) {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        if (!defs_.contains(name)) fail(ref_path, "unknown space '" + name + "'");
        if (active_.count(name)) fail(ref_path, "space '" + name + "' is defined in terms of itself");
        active_.insert(name);
        Space s = build(defs_[name], at_key("$.spaces", name));
        active_.erase(name);
        done_.emplace(name, s);
        return s;
    }

    Space build(const json& j, const std::string& path) {
        if (j.is_string()) return named(j.get<std::string>(), path);
        expect_object(j, path);
        const std::string kind = text(field(j, "kind", path), at_key(path, "kind"));
        if (kind == "euclidean" || kind == "hyperboloid") {
            reject_unknown(j, {"kind", "dim"}, path);
            const int d = dimension_of(j, path);
            return kind == "euclidean" ? Space::euclidean(d) : Space::hyperboloid(d);
        }
        if (kind == "tree") return Space::metric_tree(tree_from_json(j, path));
        if (kind == "product") {
            reject_unknown(j, {"kind", "components"}, path);
            const std::string cpath = at_key(path, "components");
            const json& comps = field(j, "components", path);
            expect_array(comps, cpath);
            if (comps.size() < 2) fail(cpath, "product needs at least two components");
            std::vector<Space> parts;
            for (std::size_t i = 0; i < comps.size(); ++i) parts.push_back(build(comps[i], at_index(cpath, i)));
            return Space::product(std::move(parts));
        }
        fail(at_key(path, "kind"), "unknown space kind '" + kind + "'");
    }

private:
    const json& defs_;
    std::map<std::string, Space> done_;
    std::set<std::string> active_;
};

// --------------------------------------------------------------- mm-spaces

GraphMM graph_from_json(const json& j, const std::string& path) {
    try {
        if (j.contains("family")) {
            reject_unknown(j, {"kind", "family", "n"}, path);
            const std::string fam = text(j["family"], at_key(path, "family"));
            const std::size_t n = count(field(j, "n", path), at_key(path, "n"));
            if (fam == "complete") {
                if (n < 1 || n > 200) fail(at_key(path, "n"), "complete graph size must be in [1, 200]");
                return GraphMM::complete(n);
            }
            if (fam == "cycle") {
                if (n < 3 || n > 200) fail(at_key(path, "n"), "cycle size must be in [3, 200]");
                return GraphMM::cycle(n);
            }
            if (fam == "path") {
                if (n < 1 || n > 200) fail(at_key(path, "n"), "path size must be in [1, 200]");
                return GraphMM::path(n);
            }
            if (fam == "hypercube") {
                if (n > 7) fail(at_key(path, "n"), "hypercube dimension must be at most 7");
                return GraphMM::hypercube(n);
            }
            fail(at_key(path, "family"), "unknown graph family '" + fam + "'");
        }

        if (j.contains("adjacency")) {
            reject_unknown(j, {"kind", "adjacency"}, path);
            const std::string apath = at_key(path, "adjacency");
            const json& adj = j["adjacency"];
            expect_object(adj, apath);
            std::vector<std::string> names;
            for (auto it = adj.begin(); it != adj.end(); ++it) names.push_back(it.key());
            std::set<std::pair<std::size_t, std::size_t>> edges;
            for (std::size_t u = 0; u < names.size(); ++u) {
                const std::string upath = at_key(apath, names[u]);
                const auto nbrs = string_list(adj[names[u]], upath);
                for (std::size_t k = 0; k < nbrs.size(); ++k) {
                    const auto it = std::find(names.begin(), names.end(), nbrs[k]);
                    if (it == names.end()) fail(at_index(upath, k), "unknown vertex '" + nbrs[k] + "'");
                    const auto w = static_cast<std::size_t>(it - names.begin());
                    if (w == u) fail(at_index(upath, k), "self-loop");
                    edges.emplace(std::min(u, w), std::max(u, w));
                }
            }
            return GraphMM(names, GraphMM::EdgeList(edges.begin(), edges.end()));
        }

        reject_unknown(j, {"kind", "vertices", "edges"}, path);
        const auto names = string_list(field(j, "vertices", path), at_key(path, "vertices"));
        const std::string epath = at_key(path, "edges");
        const json& edges = field(j, "edges", path);
        expect_array(edges, epath);
        GraphMM::EdgeList out;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const std::string p = at_index(epath, i);
            if (!edges[i].is_array() || edges[i].size() != 2) fail(p, "expected [u, v]");
            std::size_t ends[2];
            for (std::size_t k = 0; k < 2; ++k) {
                const std::string name = text(edges[i][k], at_index(p, k));
                const auto it = std::find(names.begin(), names.end(), name);
                if (it == names.end()) fail(at_index(p, k), "unknown vertex '" + name + "'");
                ends[k] = static_cast<std::size_t>(it - names.begin());
            }
            out.emplace_back(ends[0], ends[1]);
        }
        return GraphMM(names, std::move(out));
    } catch (const DisconnectedGraphError& err) {
        fail(path, err.what());
    } catch (const DomainError& err) {
        fail(path, err.what());
    }
}

MMSpace mm_from_json(const json& j, const std::string& path) {
    const std::string kind = j.contains("kind") ? text(j["kind"], at_key(path, "kind")) : "metric";
    if (kind == "discrete") {
        reject_unknown(j, {"kind", "labels", "scale"}, path);
        const auto labels = string_list(field(j, "labels", path), at_key(path, "labels"));
        const double scale = j.contains("scale") ? number(j["scale"], at_key(path, "scale")) : 1.0;
        try {
            return MMSpace::discrete(labels, scale);
        } catch (const DomainError& err) {
            fail(path, err.what());
        }
    }
    if (kind != "metric") fail(at_key(path, "kind"), "unknown mm-space kind '" + kind + "'");

    reject_unknown(j, {"kind", "labels", "metric", "prob"}, path);
    const std::string mpath = at_key(path, "metric");
    const json& rows = field(j, "metric", path);
    expect_array(rows, mpath);
    const std::size_t n = rows.size();
    if (n == 0) fail(mpath, "metric must have at least one row");
    Eigen::MatrixXd d(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::string rpath = at_index(mpath, r);
        expect_array(rows[r], rpath);
        if (rows[r].size() != n) fail(rpath, "metric must be square");
        for (std::size_t c = 0; c < n; ++c) d(r, c) = number(rows[r][c], at_index(rpath, c));
    }

    std::vector<std::string> labels;
    if (j.contains("labels")) {
        labels = string_list(j["labels"], at_key(path, "labels"));
        if (labels.size() != n) fail(at_key(path, "labels"), "need one label per metric row");
    } else {
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }

    Eigen::VectorXd prob = Eigen::VectorXd::Constant(n, 1.0 / n);
    if (j.contains("prob")) {
        prob = number_vector(j["prob"], at_key(path, "prob"));
        if (static_cast<std::size_t>(prob.size()) != n) fail(at_key(path, "prob"), "need one weight per sample");
        for (std::size_t a = 0; a < n; ++a)
            if (!(prob(static_cast<Eigen::Index>(a)) > 0.0))
                fail(at_index(at_key(path, "prob"), a), "probabilities must be positive (full support)");
    }

    // Pinpoint the offending entry before handing over to the full check.
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const std::string p = at_index(at_index(mpath, a), b);
            if (d(a, b) != d(b, a)) fail(p, "metric is not symmetric");
            if (a == b && d(a, b) != 0.0) fail(p, "diagonal must be zero");
            if (a != b && !(d(a, b) > 0.0)) fail(p, "distinct samples must be at positive distance");
            for (std::size_t c = 0; c < n; ++c)
                if (d(a, b) > d(a, c) + d(c, b) + 1e-12)
                    fail(p, "triangle inequality fails through sample " + labels[c]);
        }
    try {
        return MMSpace(labels, std::move(d), std::move(prob));
    } catch (const DomainError& err) {
        fail(path, err.what());
    }
}

// -------------------------------------------------------------------- maps

MapTable map_from_json(const json& j, const std::string& path, const Scenario& sc) {
    expect_object(j, path);
    reject_unknown(j, {"domain", "target", "values"}, path);

    const std::string tpath = at_key(path, "target");
    const std::string tname = text(field(j, "target", path), tpath);
    const auto tit = sc.spaces.find(tname);
    if (tit == sc.spaces.end()) fail(tpath, "unknown space '" + tname + "'");
    const Space& target = tit->second;

    auto mm_named = [&](const json& v, const std::string& p) -> const MMSpace& {
        const std::string name = text(v, p);
        const auto it = sc.mm_spaces.find(name);
        if (it == sc.mm_spaces.end()) fail(p, "unknown mm-space '" + name + "'");
        return it->second;
    };

    const std::string dpath = at_key(path, "domain");
    const json& dom = field(j, "domain", path);
    std::optional<ProductMMSpace> prod;
    std::optional<MMSpace> single;
    if (dom.is_array()) {
        if (dom.size() != 2) fail(dpath, "product domain needs exactly two mm-spaces");
        prod.emplace(mm_named(dom[0], at_index(dpath, 0)), mm_named(dom[1], at_index(dpath, 1)));
    } else {
        single.emplace(mm_named(dom, dpath));
    }
    const std::size_t n = prod ? prod->size() : single->size();

    const std::string vpath = at_key(path, "values");
    const json& vals = field(j, "values", path);
    expect_array(vals, vpath);
    std::vector<Point> values;
    const bool keyed = !vals.empty() && vals[0].is_object();
    if (!keyed) {
        if (vals.size() != n) fail(vpath, "expected " + std::to_string(n) + " values in x-major order");
        for (std::size_t k = 0; k < n; ++k) values.push_back(point_from_json(target, vals[k], at_index(vpath, k)));
    } else {
        std::vector<std::optional<Point>> slots(n);
        for (std::size_t k = 0; k < vals.size(); ++k) {
            const std::string p = at_index(vpath, k);
            expect_object(vals[k], p);
            reject_unknown(vals[k], {"at", "value"}, p);
            const std::string apath = at_key(p, "at");
            const json& at = field(vals[k], "at", p);
            std::size_t slot;
            auto label_index = [&](const MMSpace& m, const json& lj, const std::string& lp) {
                const std::string label = text(lj, lp);
                const auto idx = m.find_label(label);
                if (!idx) fail(lp, "unknown sample '" + label + "'");
                return *idx;
            };
            if (prod) {
                if (!at.is_array() || at.size() != 2) fail(apath, "expected [x_label, y_label]");
                slot = prod->index(label_index(prod->x(), at[0], at_index(apath, 0)),
                                   label_index(prod->y(), at[1], at_index(apath, 1)));
            } else {
                slot = label_index(*single, at, apath);
            }
            if (slots[slot]) fail(apath, "sample assigned twice");
            slots[slot] = point_from_json(target, field(vals[k], "value", p), at_key(p, "value"));
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!slots[k]) {
                std::string label;
                if (prod) {
                    const auto [i, jj] = prod->split(k);
                    label = "(" + prod->x().labels()[i] + ", " + prod->y().labels()[jj] + ")";
                } else {
                    label = single->labels()[k];
                }
                fail(vpath, "no value for sample " + label);
            }
            values.push_back(std::move(*slots[k]));
        }
    }
    return prod ? MapTable(*prod, target, std::move(values)) : MapTable(*single, target, std::move(values));
}

}  // namespace

Scenario parse_scenario(std::string_view input) {
    json root;
    try {
        root = json::parse(input.begin(), input.end());
    } catch (const json::parse_error& err) {
        fail("$", std::string("malformed JSON: ") + err.what());
    }
    expect_object(root, "$");
    reject_unknown(root, {"version", "description", "spaces", "mm_spaces", "maps", "suites", "tolerance", "seed"},
                   "$");

    Scenario sc;
    const std::size_t version = count(field(root, "version", "$"), "$.version");
    if (version != 1) fail("$.version", "unsupported scenario version " + std::to_string(version));

    if (root.contains("seed")) {
        const json& s = root["seed"];
        if (!s.is_number_unsigned()) fail("$.seed", "expected a non-negative integer");
        sc.seed = s.get<std::uint64_t>();
    }
    if (root.contains("tolerance")) {
        sc.tolerance = number(root["tolerance"], "$.tolerance");
        if (!(sc.tolerance > 0.0)) fail("$.tolerance", "tolerance must be positive");
    }

    if (root.contains("spaces")) {
        const json& defs = root["spaces"];
        expect_object(defs, "$.spaces");
        SpaceResolver resolver(defs);
        for (auto it = defs.begin(); it != defs.end(); ++it)
            sc.spaces.emplace(it.key(), resolver.named(it.key(), at_key("$.spaces", it.key())));
    }

    if (root.contains("mm_spaces")) {
        const json& defs = root["mm_spaces"];
        expect_object(defs, "$.mm_spaces");
        for (auto it = defs.begin(); it != defs.end(); ++it) {
            const std::string p = at_key("$.mm_spaces", it.key());
            expect_object(it.value(), p);
            if (it.value().contains("kind") && it.value()["kind"] == "graph") {
                GraphMM g = graph_from_json(it.value(), p);
                sc.mm_spaces.emplace(it.key(), g.mm());
                sc.graphs.emplace(it.key(), std::move(g));
            } else {
                sc.mm_spaces.emplace(it.key(), mm_from_json(it.value(), p));
            }
        }
    }

    if (root.contains("maps")) {
        const json& defs = root["maps"];
        expect_object(defs, "$.maps");
        for (auto it = defs.begin(); it != defs.end(); ++it)
            sc.maps.emplace(it.key(), map_from_json(it.value(), at_key("$.maps", it.key()), sc));
    }

    if (root.contains("suites")) {
        const json& s = root["suites"];
        expect_array(s, "$.suites");
        const auto known = suite_names();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string p = at_index("$.suites", i);
            SuiteRequest req;
            if (s[i].is_string()) {
                req.name = s[i].get<std::string>();
            } else {
                expect_object(s[i], p);
                reject_unknown(s[i], {"name", "instances"}, p);
                req.name = text(field(s[i], "name", p), at_key(p, "name"));
                if (s[i].contains("instances")) {
                    req.instances = count(s[i]["instances"], at_key(p, "instances"));
                    if (req.instances == 0) fail(at_key(p, "instances"), "instances must be positive");
                }
            }
            if (std::find(known.begin(), known.end(), req.name) == known.end())
                fail(p, "unknown suite '" + req.name + "'");
            sc.suites.push_back(std::move(req));
        }
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("$", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

GraphMM parse_graph(std::string_view input) {
    json j;
    try {
        j = json::parse(input.begin(), input.end());
    } catch (const json::parse_error& err) {
        fail("$", std::string("malformed JSON: ") + err.what());
    }
    expect_object(j, "$");
    return graph_from_json(j, "$");
}

Point parse_point(const Space& space, std::string_view input, const std::string& path) {
    json j;
    try {
        j = json::parse(input.begin(), input.end());
    } catch (const json::parse_error& err) {
        fail(path, std::string("malformed JSON: ") + err.what());
    }
    return point_from_json(space, j, path);
}

}  // namespace cat0
