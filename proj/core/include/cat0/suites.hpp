#pragma once

// Randomized property suites, report assembly, and the fixed demonstrations
// driven by the command-line tool.

#include "cat0/measures.hpp"
#include "cat0/obsvar.hpp"
#include "cat0/scenario.hpp"
#include "cat0/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cat0 {

// --------------------------------------------------------------- generators

/// Target families cycled through by the suites.
enum class TargetFamily { tripod, random_tree, euclidean, hyperboloid, tree_by_line, hyperbolic_by_tripod };
inline constexpr std::size_t kTargetFamilies = 6;

const char* to_string(TargetFamily family);
Space random_target(TargetFamily family, Rng& rng);

/// Random weights in [0.05, 1), normalized; dyadic (multiples of 1/64)
/// when `dyadic` is set.
std::vector<double> random_weights(std::size_t n, Rng& rng, bool dyadic = false);
DiscreteMeasure random_measure(const Space& space, std::size_t atoms, Rng& rng);

/// Planar point cloud, discrete space, or graph hop metric, with random
/// full-support probabilities.
MMSpace random_mm_space(std::size_t n, Rng& rng);

MapTable random_map(const ProductMMSpace& domain, const Space& target, Rng& rng);

// ------------------------------------------------------------------ reports

struct CheckResult {
    std::string suite;
    std::string check;
    std::size_t instances = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    double tolerance = 1e-9;  // passes iff min_slack >= -tolerance
    std::size_t worst_instance = npos;
    std::uint64_t worst_seed = 0;
    bool asserted = true;

    void record(double slack, std::size_t instance, std::uint64_t seed);
    bool passed() const { return !asserted || instances == 0 || min_slack >= -tolerance; }
};

struct ReportValue {
    std::string subject;
    std::string quantity;
    std::optional<double> number;
    std::string text;  // used when number is empty
};

struct SuiteReport {
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    std::vector<CheckResult> checks;
    std::vector<ReportValue> values;

    bool passed() const;
    /// Finds (or appends) the named check.
    CheckResult& check(std::string_view suite, std::string_view name, double tolerance);
    void value(std::string subject, std::string quantity, double v);
    void value(std::string subject, std::string quantity, std::string text);
};

/// "spaces", "measures", "barycenter", "transport", "fubini", "obsvar",
/// "spectral", "maps".
std::vector<std::string> suite_names();
std::size_t default_instances(std::string_view suite);

/// Per-instance seed: instance i of suite s under master seed m.
std::uint64_t instance_seed(std::uint64_t master, std::string_view suite, std::size_t instance);

void run_suite(std::string_view suite, const Scenario& scenario, std::size_t instances, SuiteReport& report);

/// Runs the scenario's suites (all of them when it lists none) restricted
/// to `filter` when non-empty.
SuiteReport run_suites(const Scenario& scenario, const std::vector<std::string>& filter = {});

/// 12 significant digits, "." decimal separator; non-finite values print as
/// inf / -inf / nan.
std::string format_number(double v);
std::string report_json(const SuiteReport& report);
std::string report_csv(const SuiteReport& report);
std::string report_text(const SuiteReport& report);

// -------------------------------------------------------------- fixed demos

/// The four-sample tripod map on {a,b} x {a,b}: f(a,a), f(b,a) on legs 1
/// and 2, f(a,b) = f(b,b) at the tip of leg 3.
MapTable tripod_example_map();

struct ConcentrationRow {
    std::size_t n = 0;
    std::string target;
    std::size_t trials = 0;
    double max_defect = 0.0;
    double mean_defect = 0.0;
    double max_v1 = 0.0;
    double max_v2 = 0.0;
    double min_slack1 = 0.0;  // min over trials of v1 - defect
    double min_slack2 = 0.0;  // min over trials of v2 / sqrt(3) - defect
};

/// Q_n x Q_n (Hamming / n metric, uniform) into the tripod and R^2, with
/// random 1-Lipschitz maps. Requires 1 <= n_min <= n_max <= 4.
std::vector<ConcentrationRow> concentration_demo(std::size_t n_min, std::size_t n_max, std::size_t trials,
                                                 std::uint64_t seed);
std::string concentration_csv(const std::vector<ConcentrationRow>& rows);

}  // namespace cat0
