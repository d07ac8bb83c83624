// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails, except for requirements flagged unattainable,
// which are still printed as FAIL together with the measured value.

#include "cat0/barycenter.hpp"
#include "cat0/fubini.hpp"
#include "cat0/obsvar.hpp"
#include "cat0/suites.hpp"
#include "cat0/transport.hpp"
#include "commands.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace cat0;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
    int id;
    std::string title;
    std::vector<std::string> failures;
    std::vector<std::string> notes;
    bool unattainable = false;  // set when every failure is an unattainable requirement

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    bool passed() const { return failures.empty(); }
};

const CheckResult* find(const SuiteReport& rep, std::string_view suite, std::string_view check) {
    for (const auto& c : rep.checks)
        if (c.suite == suite && c.check == check) return &c;
    return nullptr;
}

std::optional<double> value(const SuiteReport& rep, std::string_view subject, std::string_view quantity) {
    for (const auto& v : rep.values)
        if (v.subject == subject && v.quantity == quantity) return v.number;
    return std::nullopt;
}

std::string fmt(double v) { return format_number(v); }

// Check present, passing, over at least `min_instances` instances, with
// min slack at or above -tol.
void require_check(Criterion& c, const SuiteReport& rep, std::string_view suite, std::string_view check, double tol,
                   std::size_t min_instances) {
    const CheckResult* r = find(rep, suite, check);
    const std::string name = std::string(suite) + "/" + std::string(check);
    if (!r) {
        c.failures.push_back(name + " missing");
        return;
    }
    c.require(r->instances >= min_instances,
              name + " ran " + std::to_string(r->instances) + " < " + std::to_string(min_instances) + " instances");
    c.require(r->min_slack >= -tol, name + " min slack " + fmt(r->min_slack) + " < -" + fmt(tol) + " (instance #" +
                                        std::to_string(r->worst_instance) + ", seed " +
                                        std::to_string(r->worst_seed) + ")");
    c.notes.push_back(name + " n=" + std::to_string(r->instances) + " min=" + fmt(r->min_slack));
}

// ------------------------------------------------------------- criteria

Criterion tripod_regression() {
    Criterion c{1, "tripod regression"};
    const auto t0 = Clock::now();
    std::ostringstream out, err;
    const int code = cli::cmd_tripod(false, out, err);
    const cli::TripodValues v = cli::tripod_values();
    const double elapsed = seconds_since(t0);
    c.require(code == cli::kPass, "cmd_tripod exit " + std::to_string(code) + ": " + err.str());

    const double want[][2] = {{0, 0}, {0, 0}, {3, 1}, {3, 0.5}};
    const cli::LegCoords got[] = {v.expectation, v.slice_a, v.slice_b, v.repeated};
    const char* names[] = {"E(f)", "E(f^a)", "E(f^b)", "E_y(E(f^y))"};
    for (int k = 0; k < 4; ++k)
        c.require(std::abs(got[k][0] - want[k][0]) <= 1e-12 && std::abs(got[k][1] - want[k][1]) <= 1e-12,
                  std::string(names[k]) + " = (" + fmt(got[k][0]) + ", " + fmt(got[k][1]) + ")");

    // Enumeration over the 16 ordered sample pairs.
    const MapTable f = tripod_example_map();
    const oracle::TreeMetric d(f.target().tree());
    const std::vector<Point> vals(f.values().begin(), f.values().end());
    const std::vector<double> w(4, 0.25);
    const double v1 = oracle::variation(vals, w, d, 1.0), v2 = oracle::variation(vals, w, d, 2.0);
    const double defect = d(f.target().origin(), f.target().tree_point(2, 0.5));
    c.require(std::abs(v.defect - defect) <= 1e-12 && std::abs(defect - 0.5) <= 1e-12, "defect " + fmt(v.defect));
    c.require(std::abs(v.v1 - v1) <= 1e-12 && std::abs(v1 - 1.25) <= 1e-12, "V1 " + fmt(v.v1));
    c.require(std::abs(v.v2 - v2) <= 1e-12 && std::abs(v2 - std::sqrt(2.5)) <= 1e-12, "V2 " + fmt(v.v2));
    c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
    c.notes.push_back("defect=" + fmt(v.defect) + " V1=" + fmt(v.v1) + " V2=" + fmt(v.v2) + " in " + fmt(elapsed) +
                      " s");
    return c;
}

Criterion fubini_bounds(const SuiteReport& rep, double fubini_seconds) {
    Criterion c{2, "Fubini defect bounds"};
    for (const char* check : {"defect_le_v1", "defect_le_v2_over_sqrt3", "half_spread", "two_thirds_v2_squared"})
        require_check(c, rep, "fubini", check, 1e-9, 1000);
    const auto ratio = value(rep, "fubini", "max_defect_over_v2");
    c.require(ratio && *ratio > 0.1, "max defect/V2 " + (ratio ? fmt(*ratio) : std::string("missing")));
    c.require(ratio && *ratio <= 1.0 / std::sqrt(3.0) + 1e-9, "defect/V2 above 1/sqrt(3)");
    c.require(fubini_seconds < 60.0, "runtime " + fmt(fubini_seconds) + " s");
    c.notes.push_back("max defect/V2=" + (ratio ? fmt(*ratio) : std::string("-")) + " in " + fmt(fubini_seconds) +
                      " s");
    return c;
}

Criterion barycenter_optimality(const SuiteReport& rep, std::uint64_t seed) {
    Criterion c{3, "barycenter optimality"};
    require_check(c, rep, "barycenter", "probe_optimality", 1e-8, 1000);
    require_check(c, rep, "barycenter", "tangent_mean_residual", 1e-9, 1);
    require_check(c, rep, "barycenter", "stochastic_crosscheck", 0.05, 20);
    require_check(c, rep, "barycenter", "no_exceptions", 0.0, 1000);

    // Grid search over every edge at step 1e-3.
    Rng rng(derive_seed(seed, 100, 0));
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 1000; ++i) {
        const Space s = i % 2 ? Space::metric_tree(MetricTree::tripod())
                              : Space::metric_tree(random_tree(2 + i % 9, rng));
        const DiscreteMeasure nu = random_measure(s, 1 + i % 8, rng);
        worst = std::min(worst, oracle::tree_grid_frechet(nu).value - barycenter(nu).frechet_value);
    }
    c.require(worst >= -1e-12, "tree solver above grid minimum by " + fmt(-worst));
    c.notes.push_back("tree grid slack min=" + fmt(worst) + " over 1000 measures");
    return c;
}

Criterion transport_duality(const SuiteReport& rep, std::uint64_t seed) {
    Criterion c{4, "transport duality"};
    require_check(c, rep, "transport", "duality_gap", 1e-7, 1000);
    require_check(c, rep, "transport", "barycenter_contraction", 1e-9, 1000);
    require_check(c, rep, "transport", "marginals", 1e-10, 1000);

    Rng rng(derive_seed(seed, 101, 0));
    double worst = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const Space s = random_target(static_cast<TargetFamily>(i % kTargetFamilies), rng);
        const std::size_t n = 1 + i % 7;
        std::vector<Point> a, b;
        for (std::size_t k = 0; k < n; ++k) {
            a.push_back(sample_point(s, rng));
            b.push_back(sample_point(s, rng));
        }
        const double want =
            oracle::permutation_w1(a, b, [&](const Point& p, const Point& q) { return distance(s, p, q); });
        const double got = w1(DiscreteMeasure::uniform(s, a), DiscreteMeasure::uniform(s, b)).value;
        worst = std::max(worst, std::abs(got - want) / std::max(1.0, want));
    }
    // Summation order differs from the oracle's, so "exact" means last-bits agreement.
    c.require(worst <= 1e-12, "permutation oracle mismatch " + fmt(worst));
    c.notes.push_back("permutation oracle max rel err=" + fmt(worst) + " over 1000 instances");
    return c;
}

Criterion supporting_inequalities(const SuiteReport& rep) {
    Criterion c{5, "supporting inequalities"};
    require_check(c, rep, "barycenter", "variance_inequality", 1e-9, 1000);
    require_check(c, rep, "barycenter", "variance_equality_euclidean", 1e-10, 1);
    require_check(c, rep, "barycenter", "distance_jensen", 1e-9, 1000);
    require_check(c, rep, "spaces", "cat0_midpoint", 1e-9, 10000);
    require_check(c, rep, "spaces", "reshetnyak", 1e-9, 10000);
    require_check(c, rep, "fubini", "slice_contraction", 1e-9, 1000);
    return c;
}

Criterion product_split(const SuiteReport& rep) {
    Criterion c{6, "product splitting"};
    require_check(c, rep, "obsvar", "split_convexity", 1e-9, 1000);
    require_check(c, rep, "obsvar", "split_sharp", 1e-9, 1000);
    require_check(c, rep, "obsvar", "witness_lipschitz", 1e-9, 1000);

    // Sharp p = 2 defect of the tripod map, against row/column enumeration.
    const MapTable f = tripod_example_map();
    const oracle::TreeMetric d(f.target().tree());
    const std::vector<double> half{0.5, 0.5};
    double rows = 0.0, cols = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        rows += 0.5 * std::pow(oracle::variation({f.value(k, 0), f.value(k, 1)}, half, d, 2.0), 2);
        cols += 0.5 * std::pow(oracle::variation({f.value(0, k), f.value(1, k)}, half, d, 2.0), 2);
    }
    const double whole =
        std::pow(oracle::variation({f.values().begin(), f.values().end()}, std::vector<double>(4, 0.25), d, 2.0), 2);
    const double enumerated = rows + cols - whole;
    const double sharp = product_split_defect(f, 2.0).sharp;
    c.require(std::abs(sharp - enumerated) <= 1e-9,
              "tripod sharp defect " + fmt(sharp) + " vs enumeration " + fmt(enumerated));
    c.notes.push_back("tripod sharp defect=" + fmt(sharp) + " (rows " + fmt(rows) + " + columns " + fmt(cols) +
                      " - whole " + fmt(whole) + ")");

    const bool others_ok = c.passed();
    if (std::abs(sharp - 1.5) > 1e-9) {
        c.failures.push_back("required tripod sharp defect 1.5, measured " + fmt(sharp) +
                             "; the required value contradicts its own enumeration (2 + 1 - 5/2 = 1/2)");
        c.unattainable = others_ok;
    }
    return c;
}

Criterion spectral(const SuiteReport& rep) {
    Criterion c{7, "spectral bound"};
    require_check(c, rep, "spectral", "gap_closed_form", 1e-8, 23);  // K_n, C_n, Q_d
    require_check(c, rep, "spectral", "poincare_quotient", 1e-8, 43);
    require_check(c, rep, "spectral", "spectral_bound", 1e-9, 43 * 6);
    require_check(c, rep, "obsvar", "tree_line_comparison", 1e-6, 6);
    const auto maps = value(rep, "spectral", "maps");
    c.require(maps && *maps >= 1000, "spectral maps " + (maps ? fmt(*maps) : std::string("missing")));

    double worst = 0.0;
    for (std::size_t n = 2; n <= 10; ++n) {
        const GraphMM g = GraphMM::complete(n);
        const double o = oracle::graph_gap(g.size(), g.edges());
        worst = std::max({worst, std::abs(o - 2.0 * n / (n - 1.0)), std::abs(graph_gap(g) - o)});
    }
    const GraphMM c4 = GraphMM::cycle(4);
    const double o4 = oracle::graph_gap(c4.size(), c4.edges());
    worst = std::max({worst, std::abs(o4 - 2.0), std::abs(graph_gap(c4) - o4)});
    c.require(worst <= 1e-8, "closed forms off by " + fmt(worst));
    c.notes.push_back("K_n, C_4 vs Jacobi oracle max err=" + fmt(worst) + ", maps=" + (maps ? fmt(*maps) : "-"));
    return c;
}

Criterion determinism(const Scenario& sc, const SuiteReport& first) {
    Criterion c{8, "determinism"};
    const SuiteReport a = run_suites(sc);
    const SuiteReport b = run_suites(sc);
    c.require(report_json(a) == report_json(b), "JSON reports differ between runs");
    c.require(report_csv(a) == report_csv(b), "CSV reports differ between runs");
    c.require(report_text(a) == report_text(b), "text reports differ between runs");
    c.require(a.passed() == first.passed(), "full run disagrees with the per-suite run");
    c.notes.push_back(std::to_string(report_json(a).size()) + " JSON bytes identical across two full runs");
    return c;
}

}  // namespace

int main() {
    Scenario sc;
    sc.seed = 20240611;

    SuiteReport rep;
    rep.seed = sc.seed;
    rep.tolerance = sc.tolerance;
    double fubini_seconds = 0.0;
    for (const auto& suite : suite_names()) {
        const auto t0 = Clock::now();
        run_suite(suite, sc, default_instances(suite), rep);
        const double s = seconds_since(t0);
        if (suite == "fubini") fubini_seconds = s;
        std::printf("  suite %-10s %6.2f s\n", suite.c_str(), s);
    }

    std::vector<Criterion> all;
    all.push_back(tripod_regression());
    all.push_back(fubini_bounds(rep, fubini_seconds));
    all.push_back(barycenter_optimality(rep, sc.seed));
    all.push_back(transport_duality(rep, sc.seed));
    all.push_back(supporting_inequalities(rep));
    all.push_back(product_split(rep));
    all.push_back(spectral(rep));
    all.push_back(determinism(sc, rep));

    int passed = 0, blocking = 0;
    for (const auto& c : all) {
        std::printf("criterion %d %s  %s%s\n", c.id, c.passed() ? "PASS" : "FAIL", c.title.c_str(),
                    !c.passed() && c.unattainable ? " (unattainable as stated)" : "");
        for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
        for (const auto& f : c.failures) std::printf("    !! %s\n", f.c_str());
        if (c.passed()) ++passed;
        else if (!c.unattainable) ++blocking;
    }
    std::printf("%d/%zu criteria pass, %d blocking failure(s)\n", passed, all.size(), blocking);
    return blocking == 0 ? 0 : 1;
}
