#include "cat0/suites.hpp"

#include "cat0/barycenter.hpp"
#include "cat0/errors.hpp"
#include "cat0/fubini.hpp"
#include "cat0/transport.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cat0 {

// --------------------------------------------------------------- generators

const char* to_string(TargetFamily family) {
    switch (family) {
        case TargetFamily::tripod: return "tripod";
        case TargetFamily::random_tree: return "tree";
        case TargetFamily::euclidean: return "euclidean";
        case TargetFamily::hyperboloid: return "hyperboloid";
        case TargetFamily::tree_by_line: return "tree_x_line";
        case TargetFamily::hyperbolic_by_tripod: return "hyperbolic_x_tripod";
    }
    return "?";
}

namespace {

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_dim(Rng& rng) { return static_cast<int>(uniform_size(rng, 1, 3)); }

}  // namespace

Space random_target(TargetFamily family, Rng& rng) {
    switch (family) {
        case TargetFamily::tripod: return Space::metric_tree(MetricTree::tripod());
        case TargetFamily::random_tree: return Space::metric_tree(random_tree(uniform_size(rng, 4, 10), rng));
        case TargetFamily::euclidean: return Space::euclidean(uniform_dim(rng));
        case TargetFamily::hyperboloid: return Space::hyperboloid(uniform_dim(rng));
        case TargetFamily::tree_by_line:
            return Space::product({Space::metric_tree(random_tree(uniform_size(rng, 3, 6), rng)), Space::euclidean(1)});
        case TargetFamily::hyperbolic_by_tripod:
            return Space::product({Space::hyperboloid(2), Space::metric_tree(MetricTree::tripod())});
    }
    throw DomainError("unknown target family");
}

std::vector<double> random_weights(std::size_t n, Rng& rng, bool dyadic) {
    std::vector<double> w(n);
    if (dyadic && n <= 64) {
        std::vector<int> units(n, 1);
        for (std::size_t k = n; k < 64; ++k) ++units[uniform_size(rng, 0, n - 1)];
        for (std::size_t i = 0; i < n; ++i) w[i] = units[i] / 64.0;
        return w;
    }
    for (auto& x : w) x = uniform_real(rng, 0.05, 1.0);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return w;
}

DiscreteMeasure random_measure(const Space& space, std::size_t atoms, Rng& rng) {
    const double spread = uniform_real(rng, 0.3, 2.0);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < atoms; ++i) pts.push_back(sample_point(space, rng, spread));
    const bool dyadic = std::bernoulli_distribution(0.5)(rng);
    return DiscreteMeasure(space, std::move(pts), random_weights(atoms, rng, dyadic));
}

MMSpace random_mm_space(std::size_t n, Rng& rng) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
    const auto w = random_weights(n, rng);
    const Eigen::VectorXd prob = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));

    Eigen::MatrixXd d(n, n);
    switch (uniform_size(rng, 0, 2)) {
        case 0: {
            std::vector<Eigen::Vector2d> pts(n);
            for (auto& p : pts) p = {uniform_real(rng, 0.0, 1.0), uniform_real(rng, 0.0, 1.0)};
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) d(a, b) = (pts[a] - pts[b]).norm();
            break;
        }
        case 1: d = Eigen::MatrixXd::Constant(n, n, uniform_real(rng, 0.5, 2.0)); break;
        default: d = GraphMM::random_connected(n, 0.3, rng).mm().metric(); break;
    }
    d.diagonal().setZero();
    return MMSpace(std::move(labels), std::move(d), prob);
}

MapTable random_map(const ProductMMSpace& domain, const Space& target, Rng& rng) {
    const double spread = uniform_real(rng, 0.3, 2.0);
    std::vector<Point> v;
    for (std::size_t k = 0; k < domain.size(); ++k) v.push_back(sample_point(target, rng, spread));
    return MapTable(domain, target, std::move(v));
}

// ------------------------------------------------------------------ reports

void CheckResult::record(double slack, std::size_t instance, std::uint64_t seed) {
    ++instances;
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    if (worst_instance == npos || slack < min_slack) {
        min_slack = slack;
        worst_instance = instance;
        worst_seed = seed;
    }
}

bool SuiteReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

CheckResult& SuiteReport::check(std::string_view suite, std::string_view name, double tol) {
    for (auto& c : checks)
        if (c.suite == suite && c.check == name) return c;
    CheckResult c;
    c.suite = suite;
    c.check = name;
    c.tolerance = tol;
    checks.push_back(std::move(c));
    return checks.back();
}

void SuiteReport::value(std::string subject, std::string quantity, double v) {
    values.push_back({std::move(subject), std::move(quantity), v, {}});
}

void SuiteReport::value(std::string subject, std::string quantity, std::string text) {
    values.push_back({std::move(subject), std::move(quantity), std::nullopt, std::move(text)});
}

std::vector<std::string> suite_names() {
    return {"spaces", "measures", "barycenter", "transport", "fubini", "obsvar", "spectral", "maps"};
}

std::size_t default_instances(std::string_view suite) {
    if (suite == "spaces") return 10000;
    if (suite == "fubini") return 1021;
    return 1000;
}

std::uint64_t instance_seed(std::uint64_t master, std::string_view suite, std::size_t instance) {
    const auto names = suite_names();
    const auto it = std::find(names.begin(), names.end(), suite);
    return derive_seed(master, static_cast<std::uint64_t>(it - names.begin()) + 1, instance);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Run {
    std::string_view suite;
    const Scenario& sc;
    SuiteReport& rep;

    CheckResult& check(std::string_view name, double tol) { return rep.check(suite, name, tol); }
    CheckResult& check(std::string_view name) { return rep.check(suite, name, sc.tolerance); }
    std::uint64_t seed(std::size_t i) const { return instance_seed(sc.seed, suite, i); }

    // Any exception escaping an instance is a failure of that instance.
    template <class F>
    void guarded(std::size_t i, F&& body) {
        try {
            body();
        } catch (const std::exception&) {
            check("no_exceptions").record(kNegInf, i, seed(i));
            return;
        }
        check("no_exceptions").record(0.0, i, seed(i));
    }
};

double rel(double err, double scale) { return err / std::max(1.0, scale); }

// ------------------------------------------------------------------ spaces

// Largest |<x,x> + 1| over hyperboloid components, relative to x0^2; -1 when
// the space has none.
double sheet_error(const Space& s, const Point& p) {
    if (s.kind() == SpaceKind::hyperboloid) {
        const Eigen::VectorXd& x = p.vector();
        return std::abs(minkowski(x, x) + 1.0) / (x(0) * x(0));
    }
    double worst = -1.0;
    if (s.kind() == SpaceKind::product)
        for (std::size_t c = 0; c < s.components().size(); ++c)
            worst = std::max(worst, sheet_error(s.components()[c], p.parts()[c]));
    return worst;
}

void suite_spaces(Run& run, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            const Space s = random_target(static_cast<TargetFamily>(i % kTargetFamilies), rng);
            const double spread = uniform_real(rng, 0.3, 2.5);
            const Point x = sample_point(s, rng, spread);
            const Point y = sample_point(s, rng, spread);
            const Point z = sample_point(s, rng, spread);
            const Point w = sample_point(s, rng, spread);

            const double dxy = distance(s, x, y);
            run.check("triangle").record(dxy + distance(s, y, z) - distance(s, x, z), i, seed);
            const double mid = cat0_midpoint_defect(s, x, y, z);
            run.check("cat0_midpoint").record(mid, i, seed);
            run.check("reshetnyak").record(reshetnyak_defect(s, x, y, z, w), i, seed);
            if (s.kind() == SpaceKind::euclidean) run.check("euclidean_midpoint_equality", 1e-10).record(-std::abs(mid), i, seed);

            const double t = uniform_real(rng, 0.0, 1.0);
            const Point m = geodesic_point(s, x, y, t);
            const double err = std::abs(distance(s, x, m) - t * dxy) + std::abs(distance(s, m, y) - (1.0 - t) * dxy);
            run.check("geodesic_constant_speed").record(-rel(err, dxy), i, seed);

            if (s.kind() == SpaceKind::product) {
                double sq = 0.0;
                for (std::size_t c = 0; c < s.components().size(); ++c)
                    sq += std::pow(distance(s.components()[c], x.parts()[c], y.parts()[c]), 2);
                run.check("product_distance_l2", 1e-12).record(-rel(std::abs(std::sqrt(sq) - dxy), dxy), i, seed);
            }
            if (const double e = sheet_error(s, m); e >= 0.0) run.check("hyperboloid_sheet", 1e-10).record(-e, i, seed);

            if (s.has_tangent_maps()) {
                const TangentVector v = log_map(s, x, y);
                run.check("log_norm_is_distance").record(-rel(std::abs(tangent_norm(s, v) - dxy), dxy), i, seed);
                run.check("exp_log_roundtrip").record(-rel(distance(s, exp_map(s, v), y), dxy), i, seed);
                if (const double e = sheet_error(s, exp_map(s, v)); e >= 0.0)
                    run.check("hyperboloid_sheet", 1e-10).record(-e, i, seed);
            }
        });
    }
}

// ---------------------------------------------------------------- measures

void suite_measures(Run& run, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            const ProductMMSpace dom(random_mm_space(uniform_size(rng, 1, 6), rng),
                                     random_mm_space(uniform_size(rng, 1, 6), rng));
            const Space s = random_target(static_cast<TargetFamily>(i % kTargetFamilies), rng);
            const MapTable f = random_map(dom, s, rng);
            const DiscreteMeasure nu = pushforward(f);

            const auto w = nu.weights();
            run.check("pushforward_mass", 1e-12).record(-std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0), i, seed);

            double worst = 0.0;
            for (const Point& v : f.values()) {
                double best = std::numeric_limits<double>::infinity();
                for (const Point& a : nu.atoms()) best = std::min(best, distance(s, v, a));
                worst = std::max(worst, best);
            }
            run.check("pushforward_support", 1e-12).record(-worst, i, seed);

            const Point z = sample_point(s, rng, 1.0);
            const double fz = frechet_value(nu, z);
            run.check("moment_is_frechet").record(-rel(std::abs(moment(nu, 2.0, z) - fz), fz), i, seed);

            const std::size_t k = uniform_size(rng, 0, dom.size() - 1);
            const std::size_t l = uniform_size(rng, 0, dom.size() - 1);
            const auto [a, b] = dom.split(k);
            const auto [c, d] = dom.split(l);
            const double l2 = std::hypot(dom.x().distance(a, c), dom.y().distance(b, d));
            run.check("product_metric_l2", 1e-12).record(-std::abs(dom.joint().distance(k, l) - l2), i, seed);
        });
    }
}

// -------------------------------------------------------------- barycenter

constexpr std::size_t kProbes = 100;
constexpr std::size_t kCrosscheckInstances = 20;

void suite_barycenter(Run& run, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            const Space s = random_target(static_cast<TargetFamily>(i % kTargetFamilies), rng);
            const DiscreteMeasure nu = random_measure(s, uniform_size(rng, 1, 8), rng);
            const BarycenterResult r = barycenter(nu);
            const double f = r.frechet_value;

            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < kProbes; ++k) {
                Point probe;
                if (k < nu.size()) probe = nu.atom(k);
                else if (k % 3 == 0) probe = sample_point(s, rng, 2.0);
                else probe = sample_near(s, r.point, rng, std::pow(10.0, -static_cast<double>(k % 4)));
                worst = std::min(worst, frechet_value(nu, probe) - f);
            }
            run.check("probe_optimality").record(worst, i, seed);

            if (s.kind() == SpaceKind::product) {
                double worst_part = 0.0;
                for (std::size_t c = 0; c < s.components().size(); ++c)
                    worst_part = std::max(worst_part, distance(s.components()[c], r.point.parts()[c],
                                                               barycenter(nu.component(c)).point));
                run.check("product_split", 1e-10).record(-worst_part, i, seed);
            }

            if (s.has_tangent_maps())
                run.check("tangent_mean_residual").record(-tangent_norm(s, tangent_mean(nu, r.point)), i, seed);

            for (int k = 0; k < 5; ++k) {
                const Point z = sample_point(s, rng, 2.0);
                const double vd = variance_defect(nu, z);
                run.check("variance_inequality").record(vd, i, seed);
                if (s.kind() == SpaceKind::euclidean)
                    run.check("variance_equality_euclidean", 1e-10).record(-std::abs(vd), i, seed);
                run.check("distance_jensen").record(distance_jensen_defect(nu, z), i, seed);
            }

            if (i < kCrosscheckInstances) {
                const Point c = generic_barycenter_crosscheck(nu, seed);
                run.check("stochastic_crosscheck", 0.05).record(-distance(s, c, r.point), i, seed);
            }
        });
    }
}

// --------------------------------------------------------------- transport

constexpr std::size_t kMaxAtoms = 12;

void suite_transport(Run& run, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            const Space s = random_target(static_cast<TargetFamily>(i % kTargetFamilies), rng);
            const bool equal_weight = i % 2 == 0;
            const std::size_t m = uniform_size(rng, 1, kMaxAtoms);
            const std::size_t k = equal_weight ? m : uniform_size(rng, 1, kMaxAtoms);
            auto draw = [&](std::size_t atoms) {
                if (!equal_weight) return random_measure(s, atoms, rng);
                std::vector<Point> pts;
                for (std::size_t a = 0; a < atoms; ++a) pts.push_back(sample_point(s, rng, 1.5));
                return DiscreteMeasure::uniform(s, std::move(pts));
            };
            const DiscreteMeasure mu = draw(m);
            const DiscreteMeasure nu = draw(k);

            const TransportResult tr = w1(mu, nu);
            const DualPotential psi = dual_certificate(tr.coupling);
            run.check("duality_gap", 1e-7).record(-std::abs(tr.value - psi.objective(mu, nu)), i, seed);
            run.check("dual_lipschitz").record(-psi.lipschitz_excess(s), i, seed);
            run.check("marginals", 1e-10).record(-marginal_error(tr.coupling), i, seed);
            run.check("plan_nonnegative", 0.0).record(tr.coupling.plan.minCoeff(), i, seed);

            double independent = 0.0;
            for (std::size_t a = 0; a < mu.size(); ++a)
                for (std::size_t b = 0; b < nu.size(); ++b)
                    independent += mu.weight(a) * nu.weight(b) * distance(s, mu.atom(a), nu.atom(b));
            run.check("beats_independent_coupling").record(independent - tr.value, i, seed);

            const double dc = distance(s, barycenter(mu).point, barycenter(nu).point);
            run.check("barycenter_contraction").record(tr.value - dc, i, seed);

            run.check("w1_symmetric").record(-std::abs(w1(nu, mu).value - tr.value), i, seed);
            const DiscreteMeasure rho = random_measure(s, uniform_size(rng, 1, kMaxAtoms), rng);
            run.check("w1_triangle", 1e-8).record(w1(mu, rho).value + w1(rho, nu).value - tr.value, i, seed);
        });
    }
}

// ------------------------------------------------------------------ fubini

void fubini_checks(Run& run, const MapTable& f, const FubiniReport& r, std::size_t i, std::uint64_t seed) {
    run.check("defect_le_v1").record(r.slack1, i, seed);
    run.check("defect_le_v2_over_sqrt3").record(r.slack2, i, seed);
    run.check("half_spread").record(r.half_spread_slack, i, seed);
    run.check("two_thirds_v2_squared").record(r.two_thirds_slack, i, seed);
    const std::size_t ny = f.product().y().size();
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t y2 = y + 1; y2 < ny; ++y2)
            run.check("slice_contraction").record(slice_contraction_defect(f, r.slice_expectations, y, y2), i, seed);
    if (f.target().kind() == SpaceKind::euclidean) run.check("euclidean_exact").record(-r.defect, i, seed);
}

constexpr std::size_t kProjectMaxSamples = 36;

// Same map on Y x X.
MapTable swap_factors(const MapTable& f) {
    const ProductMMSpace& d = f.product();
    const ProductMMSpace sw(d.y(), d.x());
    std::vector<Point> values(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto [a, b] = d.split(k);
        values[sw.index(b, a)] = f.values()[k];
    }
    return MapTable(sw, f.target(), std::move(values));
}

void suite_fubini(Run& run, std::size_t n) {
    double best_ratio = 0.0;
    std::size_t best_i = npos;
    for (std::size_t i = 0; i < n; ++i) {
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            std::optional<MapTable> f;
            if (i == 0) {
                f = tripod_example_map();
            } else {
                Rng rng(seed);
                const Space s = random_target(static_cast<TargetFamily>((i - 1) % kTargetFamilies), rng);
                const ProductMMSpace dom(random_mm_space(uniform_size(rng, 1, 8), rng),
                                         random_mm_space(uniform_size(rng, 1, 8), rng));
                f = random_map(dom, s, rng);
                if (i % 4 == 1 || (i % 4 == 3 && f->size() > kProjectMaxSamples)) f = contract_to_lipschitz(*f);
                else if (i % 4 == 3) f = project_to_lipschitz(*f, rng);
            }
            const FubiniReport r = fubini_report(*f);
            fubini_checks(run, *f, r, i, seed);
            const FubiniReport sw = fubini_report(swap_factors(*f));
            run.check("swapped_v1").record(sw.slack1, i, seed);
            run.check("swapped_v2_over_sqrt3").record(sw.slack2, i, seed);
            if (r.v2 > 0.0 && r.defect / r.v2 > best_ratio) {
                best_ratio = r.defect / r.v2;
                best_i = i;
            }
        });
    }
    if (n > 0) {
        run.check("nonlinearity_exercised", 0.0)
            .record(best_ratio - 0.1, best_i == npos ? 0 : best_i, run.seed(best_i == npos ? 0 : best_i));
        run.rep.value("fubini", "max_defect_over_v2", best_ratio);
    }
}

// ------------------------------------------------------------------ obsvar

void suite_obsvar(Run& run, std::size_t n) {
    constexpr double kOrders[] = {1.0, 2.0, 3.0};
    for (std::size_t i = 0; i < n; ++i) {
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            const Space s = random_target(static_cast<TargetFamily>(i % kTargetFamilies), rng);
            const ProductMMSpace dom(random_mm_space(uniform_size(rng, 1, 6), rng),
                                     random_mm_space(uniform_size(rng, 1, 6), rng));
            MapTable f = random_map(dom, s, rng);
            f = (i % 5 == 0 && f.size() <= kProjectMaxSamples) ? project_to_lipschitz(f, rng) : contract_to_lipschitz(f);
            const double p = kOrders[i % 3];

            const LipschitzWitness w = certify_lipschitz(f, LipschitzDemand::one_lipschitz, p);
            run.check("witness_lipschitz").record(1.0 - w.lipschitz_constant, i, seed);
            const SplitDefect d = product_split_defect(f, p);
            run.check("split_convexity").record(d.convexity, i, seed);
            run.check("split_sharp").record(d.sharp, i, seed);
        });
    }

    // Fixed-size estimator checks, seeded past the map instances.
    for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t i = n + k;
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            const MMSpace x = random_mm_space(uniform_size(rng, 2, 5), rng);
            const Space targets[] = {Space::euclidean(1), Space::metric_tree(MetricTree::tripod()), Space::hyperboloid(2)};
            const Space& t = targets[k % 3];
            double prev = 0.0;
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t budget = 1; budget <= 3; ++budget) {
                const double b = obsvar_lower_bound(x, t, 2.0, budget, seed).bound;
                if (budget > 1) worst = std::min(worst, b - prev);
                prev = b;
            }
            run.check("budget_monotone", 0.0).record(worst, i, seed);
        });
    }

    for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t i = n + 6 + k;
        run.guarded(i, [&] {
            const std::uint64_t seed = run.seed(i);
            Rng rng(seed);
            MMSpace x = MMSpace::discrete({"a", "b"});
            switch (k) {
                case 0: break;
                case 1: x = GraphMM::cycle(3).mm(); break;
                case 2: x = GraphMM::cycle(4).mm(); break;
                case 3: x = GraphMM::complete(4).mm(); break;
                default: x = random_mm_space(uniform_size(rng, 3, 5), rng); break;
            }
            const Space tree = k % 2 == 0 ? Space::metric_tree(MetricTree::tripod())
                                          : Space::metric_tree(random_tree(uniform_size(rng, 3, 7), rng));
            const TreeComparison tc = tree_comparison_check(x, tree, 3, seed);
            run.check("tree_line_comparison", 1e-6).record(tc.slack, i, seed);
        });
    }
}

// ---------------------------------------------------------------- spectral

struct NamedGraph {
    std::string name;
    GraphMM graph;
    std::optional<double> closed_form;
};

std::vector<NamedGraph> spectral_family(const Run& run) {
    std::vector<NamedGraph> out;
    for (std::size_t n = 2; n <= 10; ++n)
        out.push_back({"K" + std::to_string(n), GraphMM::complete(n), 2.0 * n / (n - 1.0)});
    for (std::size_t n = 3; n <= 12; ++n)
        out.push_back({"C" + std::to_string(n), GraphMM::cycle(n), 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / n)});
    for (std::size_t d = 1; d <= 4; ++d)
        out.push_back({"Q" + std::to_string(d), GraphMM::hypercube(d), 4.0 / static_cast<double>(d)});
    for (std::size_t g = 0; g < 20; ++g) {
        Rng rng(run.seed(100000 + g));
        out.push_back({"random" + std::to_string(g),
                       GraphMM::random_connected(uniform_size(rng, 4, 12), 0.25, rng), std::nullopt});
    }
    for (const auto& [name, g] : run.sc.graphs) out.push_back({name, g, std::nullopt});
    return out;
}

void suite_spectral(Run& run, std::size_t n) {
    const auto family = spectral_family(run);
    const std::size_t combos = family.size() * 6;
    const std::size_t trials = std::max<std::size_t>(1, (n + combos - 1) / combos);
    double worst_ratio = 0.0;
    std::size_t maps = 0;

    for (std::size_t gi = 0; gi < family.size(); ++gi) {
        const NamedGraph& ng = family[gi];
        const std::size_t gid = gi * 7;
        run.guarded(gid, [&] {
            const std::uint64_t seed = run.seed(gid);
            Rng rng(seed);
            const double lambda = graph_gap(ng.graph);
            if (ng.closed_form)
                run.check("gap_closed_form", 1e-8).record(-std::abs(lambda - *ng.closed_form), gid, seed);

            const std::size_t nv = ng.graph.size();
            const double ne = static_cast<double>(ng.graph.edges().size());
            std::normal_distribution<double> gauss;
            double worst = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 10000; ++k) {
                Eigen::VectorXd g(nv);
                for (auto& c : g) c = gauss(rng);
                g.array() -= g.mean();
                double energy = 0.0;
                for (const auto& [u, v] : ng.graph.edges()) energy += std::pow(g(u) - g(v), 2);
                const double q = (energy / ne) / (g.squaredNorm() / nv);
                worst = std::min(worst, q - lambda);
            }
            run.check("poincare_quotient", 1e-8).record(worst, gid, seed);
        });

        for (int dim = 1; dim <= 3; ++dim)
            for (int hyp = 0; hyp < 2; ++hyp) {
                const std::size_t i = gid + 1 + static_cast<std::size_t>((dim - 1) * 2 + hyp);
                run.guarded(i, [&] {
                    const std::uint64_t seed = run.seed(i);
                    const Space t = hyp ? Space::hyperboloid(dim) : Space::euclidean(dim);
                    const SpectralCheck sc = spectral_obsvar_check(ng.graph, t, trials, seed);
                    run.check("spectral_bound").record(sc.min_slack, i, seed);
                    maps += sc.trials;
                    worst_ratio = std::max(worst_ratio, sc.max_v2 / sc.bound);
                });
            }
    }
    run.rep.value("spectral", "maps", static_cast<double>(maps));
    run.rep.value("spectral", "max_v2_over_bound", worst_ratio);
}

// -------------------------------------------------------------------- maps

void suite_maps(Run& run) {
    std::size_t i = 0;
    for (const auto& [name, f] : run.sc.maps) {
        run.guarded(i, [&] {
            const Space& t = f.target();
            const LipschitzWitness w = certify_lipschitz(f);
            run.rep.value(name, "lipschitz_constant", w.lipschitz_constant);
            if (!f.is_product()) {
                run.rep.value(name, "V1", variation(f, 1.0));
                run.rep.value(name, "V2", variation(f, 2.0));
                run.rep.value(name, "expectation", format_point(t, expectation(f)));
                return;
            }
            const FubiniReport r = fubini_report(f);
            fubini_checks(run, f, r, i, run.sc.seed);
            run.rep.value(name, "expectation", format_point(t, r.expectation));
            const auto& ylabels = f.product().y().labels();
            for (std::size_t j = 0; j < r.slice_expectations.size(); ++j)
                run.rep.value(name, "slice_expectation[" + ylabels[j] + "]", format_point(t, r.slice_expectations[j]));
            run.rep.value(name, "repeated", format_point(t, r.repeated));
            run.rep.value(name, "defect", r.defect);
            run.rep.value(name, "V1", r.v1);
            run.rep.value(name, "V2", r.v2);
            run.rep.value(name, "slack1", r.slack1);
            run.rep.value(name, "slack2", r.slack2);
            for (double p : {1.0, 2.0, 3.0}) {
                const SplitDefect d = product_split_defect(f, p);
                const std::string tag = "p" + std::to_string(static_cast<int>(p));
                run.rep.value(name, "split_convexity_" + tag, d.convexity);
                run.check("split_convexity").record(d.convexity, i, run.sc.seed);
                if (p == 2.0) {
                    run.rep.value(name, "split_sharp", d.sharp);
                    run.check("split_sharp").record(d.sharp, i, run.sc.seed);
                }
            }
        });
        ++i;
    }
}

}  // namespace

void run_suite(std::string_view suite, const Scenario& scenario, std::size_t instances, SuiteReport& report) {
    Run run{suite, scenario, report};
    const std::size_t n = instances ? instances : default_instances(suite);
    if (suite == "spaces") suite_spaces(run, n);
    else if (suite == "measures") suite_measures(run, n);
    else if (suite == "barycenter") suite_barycenter(run, n);
    else if (suite == "transport") suite_transport(run, n);
    else if (suite == "fubini") suite_fubini(run, n);
    else if (suite == "obsvar") suite_obsvar(run, n);
    else if (suite == "spectral") suite_spectral(run, n);
    else if (suite == "maps") suite_maps(run);
    else throw DomainError("unknown suite '" + std::string(suite) + "'");
}

SuiteReport run_suites(const Scenario& scenario, const std::vector<std::string>& filter) {
    SuiteReport rep;
    rep.seed = scenario.seed;
    rep.tolerance = scenario.tolerance;

    std::vector<SuiteRequest> plan = scenario.suites;
    if (plan.empty())
        for (const auto& name : suite_names()) plan.push_back({name, 0});
    for (const auto& req : plan) {
        if (!filter.empty() && std::find(filter.begin(), filter.end(), req.name) == filter.end()) continue;
        run_suite(req.name, scenario, req.instances, rep);
    }
    return rep;
}

// --------------------------------------------------------------- rendering

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

namespace {

nlohmann::json rounded(double v) {
    if (!std::isfinite(v)) return format_number(v);
    return std::strtod(format_number(v).c_str(), nullptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string report_json(const SuiteReport& report) {
    nlohmann::ordered_json j;
    j["seed"] = report.seed;
    j["tolerance"] = rounded(report.tolerance);
    j["passed"] = report.passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        nlohmann::ordered_json e;
        e["suite"] = c.suite;
        e["check"] = c.check;
        e["instances"] = c.instances;
        e["min_slack"] = c.instances ? rounded(c.min_slack) : nlohmann::json(nullptr);
        e["tolerance"] = rounded(c.tolerance);
        e["worst_instance"] = c.worst_instance == npos ? nlohmann::json(nullptr) : nlohmann::json(c.worst_instance);
        e["worst_seed"] = c.worst_seed;
        e["asserted"] = c.asserted;
        e["passed"] = c.passed();
        j["checks"].push_back(std::move(e));
    }
    j["values"] = nlohmann::ordered_json::array();
    for (const auto& v : report.values) {
        nlohmann::ordered_json e;
        e["subject"] = v.subject;
        e["quantity"] = v.quantity;
        e["value"] = v.number ? rounded(*v.number) : nlohmann::json(v.text);
        j["values"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

std::string report_csv(const SuiteReport& report) {
    std::ostringstream out;
    out << "kind,suite,name,instances,value,tolerance,worst_instance,worst_seed,passed\n";
    for (const auto& c : report.checks)
        out << "check," << csv_field(c.suite) << ',' << csv_field(c.check) << ',' << c.instances << ','
            << (c.instances ? format_number(c.min_slack) : "") << ',' << format_number(c.tolerance) << ','
            << (c.worst_instance == npos ? std::string() : std::to_string(c.worst_instance)) << ','
            << c.worst_seed << ',' << (c.passed() ? "true" : "false") << '\n';
    for (const auto& v : report.values)
        out << "value," << csv_field(v.subject) << ',' << csv_field(v.quantity) << ",,"
            << csv_field(v.number ? format_number(*v.number) : v.text) << ",,,,\n";
    return out.str();
}

std::string report_text(const SuiteReport& report) {
    std::ostringstream out;
    out << "seed " << report.seed << ", tolerance " << format_number(report.tolerance) << '\n';
    for (const auto& c : report.checks) {
        out << (c.passed() ? "PASS " : "FAIL ") << c.suite << '/' << c.check << "  n=" << c.instances;
        if (c.instances) {
            out << "  min_slack=" << format_number(c.min_slack) << "  tol=" << format_number(c.tolerance);
            if (c.worst_instance != npos) out << "  worst=#" << c.worst_instance << " seed=" << c.worst_seed;
        }
        out << '\n';
    }
    for (const auto& v : report.values)
        out << v.subject << '.' << v.quantity << '=' << (v.number ? format_number(*v.number) : v.text) << '\n';
    out << (report.passed() ? "all checks passed" : "some checks FAILED") << '\n';
    return out.str();
}

// -------------------------------------------------------------- fixed demos

MapTable tripod_example_map() {
    const Space t = Space::metric_tree(MetricTree::tripod());
    const MMSpace ab = MMSpace::discrete({"a", "b"});
    // x-major: (a,a), (a,b), (b,a), (b,b)
    return MapTable(ProductMMSpace(ab, ab), t,
                    {t.tree_point(0, 1.0), t.tree_point(2, 1.0), t.tree_point(1, 1.0), t.tree_point(2, 1.0)});
}

std::vector<ConcentrationRow> concentration_demo(std::size_t n_min, std::size_t n_max, std::size_t trials,
                                                 std::uint64_t seed) {
    if (n_min < 1 || n_min > n_max || n_max > 4) throw DomainError("concentration demo needs 1 <= n_min <= n_max <= 4");
    if (trials < 1) throw DomainError("concentration demo needs at least one trial");
    const Space targets[] = {Space::metric_tree(MetricTree::tripod()), Space::euclidean(2)};
    const char* names[] = {"tripod", "euclidean2"};

    std::vector<ConcentrationRow> rows;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        const GraphMM q = GraphMM::hypercube(n);
        const MMSpace qn(q.vertices(), q.mm().metric() / static_cast<double>(n), q.mm().probabilities());
        const ProductMMSpace dom(qn, qn);
        for (std::size_t t = 0; t < 2; ++t) {
            ConcentrationRow row{n, names[t], trials, 0.0, 0.0, 0.0, 0.0,
                                 std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
            for (std::size_t k = 0; k < trials; ++k) {
                Rng rng(derive_seed(seed, n * 2 + t, k));
                const MapTable f = contract_to_lipschitz(random_map(dom, targets[t], rng));
                const FubiniReport r = fubini_report(f);
                row.max_defect = std::max(row.max_defect, r.defect);
                row.mean_defect += r.defect / static_cast<double>(trials);
                row.max_v1 = std::max(row.max_v1, r.v1);
                row.max_v2 = std::max(row.max_v2, r.v2);
                row.min_slack1 = std::min(row.min_slack1, r.slack1);
                row.min_slack2 = std::min(row.min_slack2, r.slack2);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string concentration_csv(const std::vector<ConcentrationRow>& rows) {
    std::ostringstream out;
    out << "n,target,trials,max_defect,mean_defect,max_v1,max_v2,min_slack1,min_slack2,defect_le_v1,"
           "defect_le_v2_over_sqrt3\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.target << ',' << r.trials << ',' << format_number(r.max_defect) << ','
            << format_number(r.mean_defect) << ',' << format_number(r.max_v1) << ',' << format_number(r.max_v2)
            << ',' << format_number(r.min_slack1) << ',' << format_number(r.min_slack2) << ','
            << (r.min_slack1 >= -1e-9 ? "true" : "false") << ',' << (r.min_slack2 >= -1e-9 ? "true" : "false")
            << '\n';
    return out.str();
}

}  // namespace cat0
