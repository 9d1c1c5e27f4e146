#pragma once

#include <vector>

#include "beaconopt/geometry.hpp"

namespace beaconopt {

/// One beacon range observation. weight is an SNR-derived quality factor
/// (1 when unknown); it scales the corresponding row of the linear system.
struct RangeMeasurement {
    Vec3 beacon_position = Vec3::Zero();
    double distance_m = 0.0;
    double weight = 1.0;
};

struct TrilaterationProblem {
    std::vector<RangeMeasurement> measurements;  // at least 4
};

/// d = c * t. Throws std::domain_error on negative time or non-positive speed.
double range_from_toa(double time_of_flight_s, double speed_of_sound_mps);

/// Closed-form 3D trilateration: each quadratic range equation is
/// differenced against the last one, giving a linear system solved by
/// weighted least squares (rank-revealing QR; algebraically identical to
/// x = (A^T W A)^-1 A^T W b). With exact ranges this reproduces the true
/// position. Throws DegenerateGeometryError when the normal matrix is
/// singular or its condition number exceeds 1e12 (coplanar or coincident
/// beacons).
Vec3 trilaterate(const TrilaterationProblem& problem);

}  // namespace beaconopt
