#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "beaconopt/problem.hpp"

namespace beaconopt::cli {

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;        // unexpected failure
inline constexpr int kExitBadInput = 2;     // parse / validation errors
inline constexpr int kExitInfeasible = 3;   // uncoverable plan
inline constexpr int kExitNoConverge = 4;   // generation limit hit
inline constexpr int kExitMismatch = 5;     // validate found a discrepancy

/// Resolution overrides: CLI flag beats the plan file beats the default.
struct ResolutionOverrides {
    std::optional<double> drone_res_m;
    std::optional<double> beacon_res_m;
};

struct SolveOptions {
    std::string plan_path;
    std::string out_path;
    EaConfig ea;
    bool gdop_threshold_set = false;  // when false: 20 strict / 5 relaxed
    ResolutionOverrides res;
};

struct GdopMapOptions {
    std::string plan_path;
    std::string placement_path;
    std::string out_csv;
    std::string out_image;  // empty: skip the raster
    ResolutionOverrides res;
};

struct ValidateOptions {
    std::string plan_path;
    std::string placement_path;
};

struct BoundsOptions {
    std::string plan_path;
    int k = 4;
    int max_exhaustive = 25;
    ResolutionOverrides res;
};

struct SimulateOptions {
    std::string plan_path;
    std::string placement_path;
    std::string out_csv;
    double sigma_r = 0.01;
    int trials = 10000;
    int n_points = 20;
    std::uint64_t seed = 1;
    ResolutionOverrides res;
};

int cmd_solve(const SolveOptions& opt, std::ostream& out);
int cmd_gdop_map(const GdopMapOptions& opt, std::ostream& out);
int cmd_validate(const ValidateOptions& opt, std::ostream& out);
int cmd_bounds(const BoundsOptions& opt, std::ostream& out);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out);

/// Maps a thrown library error to the documented exit code.
int exit_code_for_current_exception();

}  // namespace beaconopt::cli
