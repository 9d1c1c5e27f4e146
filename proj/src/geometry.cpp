#include "beaconopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "beaconopt/errors.hpp"
#include "json.hpp"

namespace beaconopt {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

bool FloorPlan::in_flight_region(const Vec3& p) const {
    if (!inside_room(p) || p.z() < half_height()) return false;
    for (const auto& obs : obstacles)
        if (obs.contains(p)) return false;
    return true;
}

void FloorPlan::validate() const {
    if (!(extent.x() > 0 && extent.y() > 0 && extent.z() > 0))
        throw ValidationError("room extent must be strictly positive in every dimension");
    for (const auto& obs : obstacles) {
        if (!(obs.lo.x() <= obs.hi.x() && obs.lo.y() <= obs.hi.y() && obs.lo.z() <= obs.hi.z()))
            throw ValidationError("obstacle has inverted corners");
        if (!(room().contains(obs.lo) && room().contains(obs.hi)))
            throw ValidationError("obstacle extends outside the room");
    }
}

SensorModel SensorModel::tilted_array(double range_m, double half_angle_deg, double tilt_deg,
                                      int azimuth_count) {
    SensorModel m;
    m.range_m = range_m;
    m.cone_half_angle_deg = half_angle_deg;
    m.array_directions.push_back(Vec3::UnitZ());
    const double t = tilt_deg * kDegToRad;
    for (int k = 0; k < azimuth_count; ++k) {
        const double a = 2.0 * std::numbers::pi * k / azimuth_count;
        m.array_directions.emplace_back(std::sin(t) * std::cos(a), std::sin(t) * std::sin(a),
                                        std::cos(t));
    }
    m.validate();
    return m;
}

SensorModel SensorModel::defaults() {
    return tilted_array(kDefaultRangeM, kDefaultConeHalfAngleDeg, kDefaultArrayTiltDeg,
                        kDefaultArrayAzimuthCount);
}

void SensorModel::validate() const {
    if (!(range_m > 0)) throw ValidationError("sensor range must be positive");
    if (!(cone_half_angle_deg > 0 && cone_half_angle_deg < 90))
        throw ValidationError("cone half angle must lie in (0, 90) degrees");
    if (array_directions.empty()) throw ValidationError("sensor array has no directions");
    for (const auto& d : array_directions)
        if (std::abs(d.norm() - 1.0) > 1e-9)
            throw ValidationError("array directions must be unit length");
}

Vec3 canonical_tangent(const Vec3& normal) {
    Vec3 t = Vec3::UnitZ().cross(normal);
    const double n = t.norm();
    if (n < 1e-12) return Vec3::UnitX();
    return t / n;
}

Eigen::Matrix3d BeaconSite::frame() const {
    Eigen::Matrix3d R;
    R.col(0) = tangent;
    R.col(1) = normal.cross(tangent);
    R.col(2) = normal;
    return R;
}

std::vector<Vec3> BeaconSite::world_directions(const SensorModel& model) const {
    const Eigen::Matrix3d R = frame();
    std::vector<Vec3> out;
    out.reserve(model.array_directions.size());
    for (const auto& d : model.array_directions) out.push_back(R * d);
    return out;
}

namespace {

// Slab intersection of the open segment (p,q) with a closed box.
// Touching an endpoint only does not count as a hit.
bool segment_hits_box(const Vec3& p, const Vec3& q, const Box& box) {
    const Vec3 d = q - p;
    double t0 = 0.0, t1 = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (p[a] < box.lo[a] || p[a] > box.hi[a]) return false;
        } else {
            double ta = (box.lo[a] - p[a]) / d[a];
            double tb = (box.hi[a] - p[a]) / d[a];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return false;
        }
    }
    return t1 > 0.0 && t0 < 1.0;
}

}  // namespace

bool line_of_sight(const FloorPlan& plan, const Vec3& p, const Vec3& q) {
    for (const auto& obs : plan.obstacles)
        if (segment_hits_box(p, q, obs)) return false;
    return true;
}

bool beacon_covers(const SensorModel& model, const BeaconSite& site, const Vec3& point,
                   const FloorPlan& plan) {
    const Vec3 delta = point - site.position;
    const double dist = delta.norm();
    if (dist > model.range_m) return false;
    if (dist < 1e-12) return true;
    const Vec3 u = delta / dist;
    const double cos_half = std::cos(model.cone_half_angle_deg * kDegToRad);
    const Eigen::Matrix3d R = site.frame();
    bool in_cone = false;
    for (const auto& d : model.array_directions) {
        if (u.dot(R * d) >= cos_half) {
            in_cone = true;
            break;
        }
    }
    if (!in_cone) return false;
    return line_of_sight(plan, site.position, point);
}

namespace {

// Inset grid over [0, span]: res/2 + i*res while <= span - res/2.
std::vector<double> inset_axis(double span, double res) {
    std::vector<double> v;
    for (double x = res / 2; x <= span - res / 2 + 1e-9; x += res) v.push_back(x);
    return v;
}

// Grid from `from` upward while <= to - res/2 (lower edge is not a surface).
std::vector<double> half_axis(double from, double to, double res) {
    std::vector<double> v;
    for (double z = from; z <= to - res / 2 + 1e-9; z += res) v.push_back(z);
    return v;
}

bool inside_any(const std::vector<Box>& boxes, const Vec3& p) {
    for (const auto& b : boxes)
        if (b.contains(p)) return true;
    return false;
}

}  // namespace

std::pair<DroneDomain, BeaconDomain> discretize_domains(const FloorPlan& plan,
                                                        double drone_res_m,
                                                        double beacon_res_m) {
    plan.validate();
    const double min_dim = plan.extent.minCoeff();
    if (!(drone_res_m > 0 && drone_res_m <= min_dim) ||
        !(beacon_res_m > 0 && beacon_res_m <= min_dim))
        throw ValidationError("resolutions must be positive and at most the smallest room dimension");

    const double W = plan.extent.x(), D = plan.extent.y(), H = plan.extent.z();

    DroneDomain drone;
    drone.resolution_m = drone_res_m;
    {
        std::vector<Box> grown;
        grown.reserve(plan.obstacles.size());
        for (const auto& obs : plan.obstacles) grown.push_back(obs.expanded(drone_res_m / 2));
        for (double x : inset_axis(W, drone_res_m))
            for (double y : inset_axis(D, drone_res_m))
                for (double z : half_axis(H / 2, H, drone_res_m)) {
                    Vec3 p(x, y, z);
                    if (!inside_any(grown, p)) drone.points.push_back(p);
                }
    }
    if (drone.points.empty()) throw EmptyDomainError("drone domain is empty at this resolution");

    BeaconDomain beacon;
    beacon.resolution_m = beacon_res_m;
    auto add_site = [&](const Vec3& pos, const Vec3& normal) {
        if (!inside_any(plan.obstacles, pos))
            beacon.sites.push_back(BeaconSite::on_surface(pos, normal));
    };
    const auto xs = inset_axis(W, beacon_res_m);
    const auto ys = inset_axis(D, beacon_res_m);
    const auto zs = half_axis(H / 2, H, beacon_res_m);
    for (double x : xs)
        for (double y : ys) add_site(Vec3(x, y, H), Vec3(0, 0, -1));
    for (double y : ys)
        for (double z : zs) {
            add_site(Vec3(0, y, z), Vec3(1, 0, 0));
            add_site(Vec3(W, y, z), Vec3(-1, 0, 0));
        }
    for (double x : xs)
        for (double z : zs) {
            add_site(Vec3(x, 0, z), Vec3(0, 1, 0));
            add_site(Vec3(x, D, z), Vec3(0, -1, 0));
        }
    if (beacon.sites.empty()) throw EmptyDomainError("beacon domain is empty at this resolution");

    return {std::move(drone), std::move(beacon)};
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ParseError(std::string("unknown field '") + it.key() + "' in " + where);
    }
}

Vec3 parse_vec3(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw ParseError(std::string(what) + " must be an array of three numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ParseError("top-level document must be an object");
    reject_unknown(doc,
                   {"schema_version", "room", "obstacles", "sensor", "drone_resolution_m",
                    "beacon_resolution_m"},
                   "floor plan");
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != 1)
        throw ParseError("schema_version must be the integer 1");
    if (!doc.contains("room")) throw ParseError("missing 'room' field");

    Scenario sc;
    sc.plan.extent = parse_vec3(doc["room"], "room");
    if (doc.contains("obstacles")) {
        if (!doc["obstacles"].is_array()) throw ParseError("'obstacles' must be an array");
        for (const auto& o : doc["obstacles"]) {
            if (!o.is_object()) throw ParseError("obstacle must be an object");
            reject_unknown(o, {"min", "max"}, "obstacle");
            if (!o.contains("min") || !o.contains("max"))
                throw ParseError("obstacle needs 'min' and 'max' corners");
            sc.plan.obstacles.push_back(
                Box{parse_vec3(o["min"], "obstacle min"), parse_vec3(o["max"], "obstacle max")});
        }
    }
    sc.plan.validate();

    double range = kDefaultRangeM, half = kDefaultConeHalfAngleDeg, tilt = kDefaultArrayTiltDeg;
    int azim = kDefaultArrayAzimuthCount;
    if (doc.contains("sensor")) {
        const auto& s = doc["sensor"];
        if (!s.is_object()) throw ParseError("'sensor' must be an object");
        reject_unknown(s, {"range_m", "cone_half_angle_deg", "array_tilt_deg",
                           "array_azimuth_count"},
                       "sensor");
        auto num = [&](const char* key, double& out) {
            if (s.contains(key)) {
                if (!s[key].is_number()) throw ParseError(std::string(key) + " must be a number");
                out = s[key].get<double>();
            }
        };
        num("range_m", range);
        num("cone_half_angle_deg", half);
        num("array_tilt_deg", tilt);
        if (s.contains("array_azimuth_count")) {
            if (!s["array_azimuth_count"].is_number_integer())
                throw ParseError("array_azimuth_count must be an integer");
            azim = s["array_azimuth_count"].get<int>();
            if (azim < 1) throw ValidationError("array_azimuth_count must be at least 1");
        }
        if (!(tilt >= 0 && tilt < 90)) throw ValidationError("array tilt must lie in [0, 90)");
    }
    sc.sensor = SensorModel::tilted_array(range, half, tilt, azim);

    auto res_field = [&](const char* key, double& out) {
        if (doc.contains(key)) {
            if (!doc[key].is_number()) throw ParseError(std::string(key) + " must be a number");
            out = doc[key].get<double>();
            if (!(out > 0)) throw ValidationError(std::string(key) + " must be positive");
        }
    };
    res_field("drone_resolution_m", sc.drone_resolution_m);
    res_field("beacon_resolution_m", sc.beacon_resolution_m);
    return sc;
}

}  // namespace

Scenario load_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

FloorPlan load_floor_plan(const std::string& text) { return load_scenario(text).plan; }

}  // namespace beaconopt
