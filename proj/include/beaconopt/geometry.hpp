#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace beaconopt {

using Vec3 = Eigen::Vector3d;

/// Axis-aligned box, closed on all faces.
struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3& p) const {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y() &&
               p.z() >= lo.z() && p.z() <= hi.z();
    }
    Box expanded(double d) const { return Box{lo.array() - d, hi.array() + d}; }
};

/// Room bounding box anchored at the origin plus opaque axis-aligned
/// obstacle boxes. Obstacles block ultrasound like an extra wall.
struct FloorPlan {
    Vec3 extent = Vec3::Zero();  // room is [0,extent.x] x [0,extent.y] x [0,extent.z]
    std::vector<Box> obstacles;

    Box room() const { return Box{Vec3::Zero(), extent}; }
    double half_height() const { return extent.z() / 2.0; }
    bool inside_room(const Vec3& p) const { return room().contains(p); }
    /// Inside the room, in the upper half, and outside every obstacle:
    /// the continuous region the drone grid samples.
    bool in_flight_region(const Vec3& p) const;

    /// Throws ValidationError if extents are non-positive or an obstacle
    /// is not fully contained in the room.
    void validate() const;
};

/// Ultrasonic array model: several sensor cones sharing one mount point.
/// array_directions are unit vectors in the mount-local frame where +z is
/// the inward surface normal.
struct SensorModel {
    double range_m = 7.0;
    double cone_half_angle_deg = 45.0;
    std::vector<Vec3> array_directions;

    /// Axial sensor plus `azimuth_count` sensors tilted `tilt_deg`
    /// off-normal, evenly spaced in azimuth.
    static SensorModel tilted_array(double range_m, double half_angle_deg, double tilt_deg,
                                    int azimuth_count);
    /// Calibrated defaults: range 7 m, half-angle 45 deg, 6 directions
    /// (axial + 5 at 55 deg tilt).
    static SensorModel defaults();

    void validate() const;
};

inline constexpr double kDefaultRangeM = 7.0;
inline constexpr double kDefaultConeHalfAngleDeg = 45.0;
inline constexpr double kDefaultArrayTiltDeg = 55.0;
inline constexpr int kDefaultArrayAzimuthCount = 5;
inline constexpr double kDefaultResolutionM = 0.25;

/// Deterministic in-plane reference for a mount normal: normalize(z x n),
/// falling back to +x when n is vertical.
Vec3 canonical_tangent(const Vec3& normal);

/// One beacon mount: position on a surface, inward normal, and the
/// azimuth anchor of the sensor array. Together normal+tangent fix the
/// full mount orientation.
struct BeaconSite {
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    Vec3 tangent = Vec3::UnitX();

    static BeaconSite on_surface(const Vec3& position, const Vec3& normal) {
        return BeaconSite{position, normal, canonical_tangent(normal)};
    }
    /// Columns (tangent, normal x tangent, normal): maps mount-local
    /// coordinates to world.
    Eigen::Matrix3d frame() const;
    /// Array directions rotated into the world frame.
    std::vector<Vec3> world_directions(const SensorModel& model) const;
};

/// Discretized flight positions (upper-half interior grid).
struct DroneDomain {
    std::vector<Vec3> points;
    double resolution_m = kDefaultResolutionM;
};

/// Discretized candidate mounts on the ceiling and top-half walls.
struct BeaconDomain {
    std::vector<BeaconSite> sites;
    double resolution_m = kDefaultResolutionM;
};

/// True iff the open segment (p,q) crosses no obstacle box. Grazing an
/// obstacle face counts as blocked.
bool line_of_sight(const FloorPlan& plan, const Vec3& p, const Vec3& q);

/// Single-beacon coverage predicate: in range, within the cone of at
/// least one array direction, and line of sight unobstructed.
bool beacon_covers(const SensorModel& model, const BeaconSite& site, const Vec3& point,
                   const FloorPlan& plan);

/// Grid the upper-half interior (drone positions, half-cell inset from
/// every surface) and the ceiling plus top-half wall surfaces (beacon
/// mounts). Throws EmptyDomainError when either grid ends up empty.
std::pair<DroneDomain, BeaconDomain> discretize_domains(const FloorPlan& plan,
                                                        double drone_res_m,
                                                        double beacon_res_m);

/// A parsed scenario file: plan plus optional sensor/resolution overrides.
struct Scenario {
    FloorPlan plan;
    SensorModel sensor = SensorModel::defaults();
    double drone_resolution_m = kDefaultResolutionM;
    double beacon_resolution_m = kDefaultResolutionM;
};

/// Parse a floor-plan document (strict: unknown fields rejected).
FloorPlan load_floor_plan(const std::string& text);

/// Parse the full scenario (plan + sensor override + resolutions).
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

}  // namespace beaconopt
