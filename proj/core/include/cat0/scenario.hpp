#pragma once

// JSON scenario files: named spaces, mm-spaces, graphs and maps, plus the
// suites to run. All parse errors are ValidationError with a JSON path.

#include "cat0/measures.hpp"
#include "cat0/obsvar.hpp"
#include "cat0/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cat0 {

struct SuiteRequest {
    std::string name;
    std::size_t instances = 0;  // 0: suite default
};

struct Scenario {
    int version = 1;
    std::map<std::string, Space> spaces;
    std::map<std::string, MMSpace> mm_spaces;
    std::map<std::string, GraphMM> graphs;  // also present in mm_spaces
    std::map<std::string, MapTable> maps;
    std::vector<SuiteRequest> suites;  // empty: all suites
    double tolerance = 1e-9;
    std::uint64_t seed = 0;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Bare graph description, in any of the forms accepted for "kind": "graph"
/// mm-spaces (adjacency object, vertices + edges, or family + n).
GraphMM parse_graph(std::string_view json_text);

/// Point in the JSON coordinate format of `space`: a number array for
/// Euclidean space, spatial (d) or ambient (d + 1) coordinates for the
/// hyperboloid, a vertex name or ["edge", offset] for trees, and an array of
/// component points for products. `path` prefixes error messages.
Point parse_point(const Space& space, std::string_view json_text, const std::string& path = "$");

}  // namespace cat0
