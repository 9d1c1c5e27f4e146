#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beaconopt/coverage.hpp"
#include "beaconopt/geometry.hpp"

namespace beaconopt {

struct SolveConfigEcho {
    std::uint64_t seed = 1;
    int population = 250;
    int survivors = 5;
    int k = 4;
    double coverage_threshold = 1.0;
    double gdop_threshold = 20.0;
    int max_generations = 500;
    double drone_resolution_m = kDefaultResolutionM;
    double beacon_resolution_m = kDefaultResolutionM;
};

/// On-disk result of `solve`: beacon mounts plus recomputable metadata.
/// wall_time_s is the only field that varies between identical runs.
struct PlacementDocument {
    std::vector<BeaconSite> beacons;
    std::vector<double> coverage_fractions;  // k = 1..config.k
    double gdop_avg = 0.0;                   // mean over 4-covered domain points
    std::string gdop_band;
    SolveConfigEcho config;
    int generations_stage1 = 0;
    int generations_stage2 = 0;
    double wall_time_s = 0.0;
    std::string tool_version;

    BeaconPlacement placement() const { return BeaconPlacement{beacons}; }
};

std::string write_placement_json(const PlacementDocument& doc);
PlacementDocument read_placement_json(const std::string& text);  // strict parse
PlacementDocument read_placement_file(const std::string& path);

}  // namespace beaconopt
