#include "commands.hpp"

#include "cat0/errors.hpp"
#include "cat0/fubini.hpp"
#include "cat0/obsvar.hpp"
#include "cat0/scenario.hpp"
#include "cat0/suites.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cat0::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("$", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool write_output(const std::string& target, const std::string& body, std::ostream& out, std::ostream& err) {
    if (target == "-") {
        out << body;
        return true;
    }
    std::ofstream f(target, std::ios::binary);
    if (!f || !(f << body)) {
        err << "error: cannot write " << target << '\n';
        return false;
    }
    return true;
}

LegCoords leg_coords(const Space& tripod, const Point& p) {
    const TreeCoords& t = p.tree();
    const MetricTree& tree = tripod.tree();
    if (t.at_vertex()) {
        if (t.vertex == 0) return {0.0, 0.0};
        const std::size_t e = tree.next_edge(0, t.vertex);
        return {static_cast<double>(e + 1), tree.edge(e).length};
    }
    return {static_cast<double>(t.edge + 1), t.offset};
}

std::string show(const LegCoords& c) { return "(" + format_number(c[0]) + ", " + format_number(c[1]) + ")"; }

}  // namespace

// ------------------------------------------------------------------ verify

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(opt.scenario);
    } catch (const ValidationError& e) {
        err << "invalid scenario " << opt.scenario << ": " << e.what() << '\n';
        return kInputError;
    }
    const auto known = suite_names();
    for (const auto& s : opt.suites)
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            err << "unknown suite '" << s << "'\n";
            return kInputError;
        }
    if (opt.seed) sc.seed = *opt.seed;

    const SuiteReport rep = run_suites(sc, opt.suites);
    const bool to_stdout = opt.json_out == "-" || opt.csv_out == "-";
    if (!to_stdout) out << report_text(rep);
    if (!opt.json_out.empty() && !write_output(opt.json_out, report_json(rep), out, err)) return kInputError;
    if (!opt.csv_out.empty() && !write_output(opt.csv_out, report_csv(rep), out, err)) return kInputError;
    return rep.passed() ? kPass : kViolation;
}

// ------------------------------------------------------------------ tripod

TripodValues tripod_values() {
    const MapTable f = tripod_example_map();
    const Space& t = f.target();
    const FubiniReport r = fubini_report(f);
    TripodValues v;
    v.expectation = leg_coords(t, r.expectation);
    v.slice_a = leg_coords(t, r.slice_expectations.at(0));
    v.slice_b = leg_coords(t, r.slice_expectations.at(1));
    v.repeated = leg_coords(t, r.repeated);
    v.defect = r.defect;
    v.v1 = r.v1;
    v.v2 = r.v2;
    return v;
}

int cmd_tripod(bool json, std::ostream& out, std::ostream& err) {
    const TripodValues v = tripod_values();

    struct Expect {
        const char* name;
        double got;
        double want;
    };
    const Expect expected[] = {
        {"E(f) leg", v.expectation[0], 0.0},     {"E(f) t", v.expectation[1], 0.0},
        {"E(f^a) leg", v.slice_a[0], 0.0},       {"E(f^a) t", v.slice_a[1], 0.0},
        {"E(f^b) leg", v.slice_b[0], 3.0},       {"E(f^b) t", v.slice_b[1], 1.0},
        {"E_y(E(f^y)) leg", v.repeated[0], 3.0}, {"E_y(E(f^y)) t", v.repeated[1], 0.5},
        {"defect", v.defect, 0.5},               {"V1", v.v1, 1.25},
        {"V2", v.v2, std::sqrt(2.5)},
    };
    bool ok = true;
    for (const auto& e : expected)
        if (!(std::abs(e.got - e.want) <= 1e-12)) {
            err << "tripod mismatch: " << e.name << " = " << format_number(e.got) << ", expected "
                << format_number(e.want) << '\n';
            ok = false;
        }

    if (json) {
        auto pair = [](const LegCoords& c) { return "[" + format_number(c[0]) + ", " + format_number(c[1]) + "]"; };
        out << "{\n"
            << "  \"expectation\": " << pair(v.expectation) << ",\n"
            << "  \"slice_expectations\": {\"a\": " << pair(v.slice_a) << ", \"b\": " << pair(v.slice_b) << "},\n"
            << "  \"repeated\": " << pair(v.repeated) << ",\n"
            << "  \"defect\": " << format_number(v.defect) << ",\n"
            << "  \"V1\": " << format_number(v.v1) << ",\n"
            << "  \"V2\": " << format_number(v.v2) << ",\n"
            << "  \"passed\": " << (ok ? "true" : "false") << "\n"
            << "}\n";
    } else {
        out << "tripod map on {a,b} x {a,b}, points as (leg, distance from centre)\n"
            << "E(f)         = " << show(v.expectation) << '\n'
            << "E(f^a)       = " << show(v.slice_a) << '\n'
            << "E(f^b)       = " << show(v.slice_b) << '\n'
            << "E_y(E(f^y))  = " << show(v.repeated) << '\n'
            << "defect       = " << format_number(v.defect) << '\n'
            << "V1           = " << format_number(v.v1) << '\n'
            << "V2           = " << format_number(v.v2) << '\n'
            << (ok ? "all values exact" : "MISMATCH") << '\n';
    }
    return ok ? kPass : kViolation;
}

// ----------------------------------------------------------- concentration

int cmd_concentration(const ConcentrationOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<ConcentrationRow> rows;
    try {
        rows = concentration_demo(opt.n_min, opt.n_max, opt.trials, opt.seed);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    const std::string csv = concentration_csv(rows);
    if (!write_output(opt.csv_out.empty() ? "-" : opt.csv_out, csv, out, err)) return kInputError;

    bool ok = true;
    for (const auto& r : rows)
        if (r.min_slack1 < -1e-9 || r.min_slack2 < -1e-9) {
            err << "violation at n=" << r.n << " target " << r.target << '\n';
            ok = false;
        }
    // The trend is asymptotic, so a rise is only worth a warning. Defects at
    // rounding level (flat targets) carry no trend.
    constexpr double kNoise = 1e-12;
    for (const auto& first : rows)
        for (const auto& last : rows)
            if (first.target == last.target && first.n == opt.n_min && last.n == opt.n_max && last.n > first.n &&
                last.mean_defect > first.mean_defect + kNoise)
                err << "warning: mean defect for " << first.target << " rose from n=" << first.n << " to n=" << last.n
                    << '\n';
    return ok ? kPass : kViolation;
}

// ---------------------------------------------------------------- spectral

int cmd_spectral(const SpectralOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<std::pair<std::string, GraphMM>> graphs;
    try {
        const std::string body = read_file(opt.graph);
        if (body.find("\"version\"") != std::string::npos) {
            const Scenario sc = parse_scenario(body);
            for (const auto& [name, g] : sc.graphs) graphs.emplace_back(name, g);
            if (graphs.empty()) throw ValidationError("$.mm_spaces", "scenario defines no graphs");
        } else {
            graphs.emplace_back(std::filesystem::path(opt.graph).stem().string(), parse_graph(body));
        }
    } catch (const ValidationError& e) {
        err << "invalid graph file " << opt.graph << ": " << e.what() << '\n';
        return kInputError;
    }
    if (opt.dim && (*opt.dim < 1 || *opt.dim > 64)) {
        err << "error: --dim must be between 1 and 64\n";
        return kInputError;
    }

    bool ok = true;
    out << "graph,vertices,edges,target,dim,lambda1,bound,max_v2,min_slack\n";
    for (const auto& [name, g] : graphs) {
        if (g.size() < 2) {
            err << "graph " << name << " needs at least two vertices\n";
            return kInputError;
        }
        const int lo = opt.dim.value_or(1);
        const int hi = opt.dim.value_or(3);
        for (int d = lo; d <= hi; ++d)
            for (int hyp = 0; hyp < 2; ++hyp) {
                const Space t = hyp ? Space::hyperboloid(d) : Space::euclidean(d);
                const SpectralCheck c = spectral_obsvar_check(g, t, opt.trials, derive_seed(opt.seed, d, hyp));
                out << name << ',' << g.size() << ',' << g.edges().size() << ',' << (hyp ? "hyperboloid" : "euclidean")
                    << ',' << d << ',' << format_number(c.lambda1) << ',' << format_number(c.bound) << ','
                    << format_number(c.max_v2) << ',' << format_number(c.min_slack) << '\n';
                if (c.min_slack < -1e-9) ok = false;
            }
    }
    return ok ? kPass : kViolation;
}

// -------------------------------------------------------------------- argv

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Barycenters, transport and Fubini-type inequalities on CAT(0) targets"};
    app.require_subcommand(1);

    VerifyOptions verify;
    std::uint64_t verify_seed = 0;
    auto* v = app.add_subcommand("verify", "Run property suites on a scenario file");
    v->add_option("scenario", verify.scenario, "Scenario JSON")->required();
    v->add_option("--suite", verify.suites, "Restrict to these suites (repeatable)");
    auto* seed_opt = v->add_option("--seed", verify_seed, "Override the scenario's master seed");
    auto* json_opt = v->add_option("--json", verify.json_out, "Write a JSON report (- for stdout)");
    v->add_option("--csv", verify.csv_out, "Write a CSV report (- for stdout)")->excludes(json_opt);

    bool tripod_json = false;
    auto* t = app.add_subcommand("tripod", "Reproduce the tripod example exactly");
    t->add_flag("--json", tripod_json, "Machine-readable output");

    ConcentrationOptions conc;
    auto* c = app.add_subcommand("concentration", "Fubini defect along hypercube products Q_n x Q_n");
    c->add_option("--n-min", conc.n_min)->capture_default_str();
    c->add_option("--n-max", conc.n_max)->capture_default_str();
    c->add_option("--trials", conc.trials)->capture_default_str();
    c->add_option("--seed", conc.seed)->capture_default_str();
    c->add_option("--csv", conc.csv_out, "Output file (default stdout)");

    SpectralOptions spec;
    int spec_dim = 0;
    auto* s = app.add_subcommand("spectral", "Spectral bound check on graphs");
    s->add_option("graph", spec.graph, "Graph JSON or scenario with graph mm-spaces")->required();
    auto* dim_opt = s->add_option("--dim", spec_dim, "Target dimension (default: 1, 2 and 3)");
    s->add_option("--trials", spec.trials)->capture_default_str();
    s->add_option("--seed", spec.seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kInputError;
    }

    try {
        if (v->parsed()) {
            if (*seed_opt) verify.seed = verify_seed;
            return cmd_verify(verify, out, err);
        }
        if (t->parsed()) return cmd_tripod(tripod_json, out, err);
        if (c->parsed()) return cmd_concentration(conc, out, err);
        if (s->parsed()) {
            if (*dim_opt) spec.dim = spec_dim;
            return cmd_spectral(spec, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace cat0::cli
