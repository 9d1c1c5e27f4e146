#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beaconopt/coverage.hpp"
#include "beaconopt/geometry.hpp"

namespace beaconopt {

struct MinCoverResult {
    bool feasible = false;
    int count = 0;
    std::vector<int> sites;  // lexicographically smallest optimal subset
};

/// Exact minimum k-cover by cardinality-ordered exhaustive enumeration.
/// Throws SizeError when the matrix has more than max_sites rows.
MinCoverResult brute_force_min_cover(const ConnectivityMatrix& bc, int k, int max_sites = 25);

struct LowerBoundParts {
    int counting = 0;  // ceil(k |D| / max row sum)
    int lp = 0;        // LP relaxation optimum, rounded up
};

/// max(counting bound, LP-relaxation bound); both certified lower bounds on
/// the integer optimum. Throws InfeasibleError when some point cannot reach
/// k covering sites even with every site selected.
LowerBoundParts lower_bound_parts(const ConnectivityMatrix& bc, int k);
int lower_bound(const ConnectivityMatrix& bc, int k);

struct SimReport {
    Vec3 point = Vec3::Zero();
    double rmse_m = 0.0;
    double predicted_sigma_m = 0.0;  // sigma_r * GDOP at the point
    double ratio = 0.0;              // rmse / predicted
    int trials = 0;
    double sigma_r = 0.0;
};

/// Monte-Carlo localization: perturb true ranges to the covering beacons
/// with N(0, sigma_r^2) noise, trilaterate, and report per-point RMSE
/// against the sigma_r * GDOP prediction. Deterministic per-trial RNG
/// substreams; results independent of thread schedule.
std::vector<SimReport> simulate_localization(const BeaconPlacement& placement,
                                             std::span<const Vec3> points, double sigma_r,
                                             int trials, std::uint64_t seed,
                                             const FloorPlan& plan, const SensorModel& model);

}  // namespace beaconopt
