#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cat0::cli {

// Process exit codes.
inline constexpr int kPass = 0;
inline constexpr int kViolation = 1;
inline constexpr int kInputError = 2;

struct VerifyOptions {
    std::string scenario;
    std::vector<std::string> suites;  // empty: all
    std::optional<std::uint64_t> seed;
    std::string json_out;  // "-" for stdout
    std::string csv_out;
};

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);

// Tripod coordinates: (leg, distance from the centre), centre = (0, 0).
using LegCoords = std::array<double, 2>;

struct TripodValues {
    LegCoords expectation{};
    LegCoords slice_a{};
    LegCoords slice_b{};
    LegCoords repeated{};
    double defect = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
};

TripodValues tripod_values();
int cmd_tripod(bool json, std::ostream& out, std::ostream& err);

struct ConcentrationOptions {
    std::size_t n_min = 1;
    std::size_t n_max = 4;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    std::string csv_out;  // empty: stdout
};

int cmd_concentration(const ConcentrationOptions& opt, std::ostream& out, std::ostream& err);

struct SpectralOptions {
    std::string graph;
    std::optional<int> dim;  // empty: 1..3
    std::size_t trials = 100;
    std::uint64_t seed = 0;
};

int cmd_spectral(const SpectralOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cat0::cli
