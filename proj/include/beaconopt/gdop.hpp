#pragma once

#include <span>
#include <string>
#include <vector>

#include "beaconopt/geometry.hpp"

namespace beaconopt {

struct BeaconPlacement;  // coverage.hpp

/// Quality bands for GDOP values (half-open upper bounds; exactly 1 is Ideal).
enum class GdopBand {
    ErrorOrRedundancy,  // < 1
    Ideal,              // = 1
    VeryGood,           // (1, 2]
    Good,               // (2, 5]
    Medium,             // (5, 10]
    Sufficient,         // (10, 20]
    Bad,                // > 20
};

const char* band_name(GdopBand band);

/// Cap applied to singular / under-covered evaluations.
inline constexpr double kGdopCap = 1e6;

struct GdopResult {
    double value = kGdopCap;
    GdopBand band = GdopBand::Bad;
    bool singular = true;
};

/// GDOP values over a drone domain. `average` is the arithmetic mean over
/// all points with singular points included at the cap; `covered_average`
/// is the mean over points covered by at least 4 beacons (the quantity the
/// solver constrains; equals `average` at full coverage).
struct GdopField {
    std::vector<GdopResult> per_point;  // aligned with DroneDomain::points
    double average = kGdopCap;
    double covered_average = kGdopCap;
    double fraction_singular = 1.0;
};

struct Crb2dInput {
    std::vector<double> beacon_angles_rad;  // >= 2 angles
    double sigma_r = 1.0;                   // > 0
};

/// n x 3 matrix of unit rows (beacon_i - target)/r_i. Throws
/// CoincidentPointError when some r_i is zero.
Eigen::MatrixXd direction_cosine_matrix(const Vec3& target, std::span<const Vec3> beacons);

/// GDOP = sqrt(trace((C^T C)^-1)). Needs at least 3 beacons; flagged
/// singular (value capped) when C^T C has condition number above 1e12.
GdopResult gdop_at(const Vec3& target, std::span<const Vec3> beacons);

/// Classify a positive GDOP value into its band. Throws std::domain_error
/// on non-positive values.
GdopBand classify_band(double value);

/// Per-point GDOP over the domain using, at each point, exactly the
/// beacons that cover it; points with fewer than 4 covering beacons are
/// singular at the cap. Deterministic regardless of thread schedule.
GdopField gdop_field(const DroneDomain& domain, const BeaconPlacement& placement,
                     const FloorPlan& plan, const SensorModel& model);

/// 2D Cramer-Rao position bound: sigma_r * sqrt(N / sum_{k<j} |sin(t_k - t_j)|).
/// Throws DegenerateGeometryError when the sine sum vanishes.
double crb_2d(const Crb2dInput& input);

/// 2D DOP from bearing angles via the trace identity:
/// sqrt(N / sum_{k<j} sin^2(t_k - t_j)). Kept separate from crb_2d; the two
/// formulas are not equivalent.
double dop_2d_from_angles(std::span<const double> angles_rad);

}  // namespace beaconopt
