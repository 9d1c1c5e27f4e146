#include "beaconopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "beaconopt/errors.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/parallel.hpp"

namespace beaconopt {

void EaConfig::validate() const {
    if (population_size_p < 1 || survivor_count_s < 1)
        throw ValidationError("population and survivor counts must be positive");
    if (survivor_count_s > population_size_p)
        throw ValidationError("survivor count exceeds population size");
    if (population_size_p % survivor_count_s != 0)
        throw ValidationError("survivor count must divide population size evenly");
    if (k_target < 1) throw ValidationError("k target must be at least 1");
    if (!(coverage_threshold > 0 && coverage_threshold <= 1))
        throw ValidationError("coverage threshold must lie in (0, 1]");
    if (!(gdop_threshold_g > 0)) throw ValidationError("GDOP threshold must be positive");
    if (max_generations < 1) throw ValidationError("max generations must be positive");
    if (!(mutation_rate >= 0 && mutation_rate <= 1))
        throw ValidationError("mutation rate must lie in [0, 1]");
}

double covered_gdop_average(std::span<const Bitset* const> rows, std::span<const Vec3> positions,
                            std::span<const Vec3> points) {
    const int n = static_cast<int>(points.size());
    std::vector<double> value(n, -1.0);  // -1 marks under-covered
    parallel_for(n, [&](int j) {
        std::vector<Vec3> covering;
        for (size_t i = 0; i < rows.size(); ++i)
            if (rows[i]->test(j)) covering.push_back(positions[i]);
        if (covering.size() >= 4) value[j] = gdop_at(points[j], covering).value;
    });
    double sum = 0.0;
    int covered = 0;
    for (int j = 0; j < n; ++j)
        if (value[j] >= 0) {
            sum += value[j];
            ++covered;
        }
    return covered > 0 ? sum / covered : kGdopCap;
}

namespace {

constexpr double kCoincideTol = 1e-3;  // 1 mm, matches the cache quantization

std::uint64_t quantize_key(const BeaconSite& site) {
    auto q = [](double v) {
        return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(v * 1000.0)));
    };
    // Normal axis id disambiguates corner positions shared by two walls.
    int axis = 0;
    for (int a = 0; a < 3; ++a) {
        if (site.normal[a] > 0.5) axis = 2 * a + 1;
        if (site.normal[a] < -0.5) axis = 2 * a + 2;
    }
    std::uint64_t h = splitmix64(q(site.position.x()));
    h = splitmix64(h ^ q(site.position.y()));
    h = splitmix64(h ^ q(site.position.z()));
    h = splitmix64(h ^ static_cast<std::uint64_t>(axis));
    return h;
}

// Minimal rotation taking +z to `to` (expects unit input).
Eigen::Matrix3d rotation_z_to(const Vec3& to) {
    const Vec3 z = Vec3::UnitZ();
    const Vec3 axis = z.cross(to);
    const double s = axis.norm(), c = z.dot(to);
    if (s < 1e-12) {
        if (c > 0) return Eigen::Matrix3d::Identity();
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(1, 1) = flip(2, 2) = -1;  // 180 deg about x
        return flip;
    }
    return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

}  // namespace

PlacementProblem::PlacementProblem(FloorPlan plan, SensorModel model, double drone_res_m,
                                   double beacon_res_m)
    : plan_(std::move(plan)), model_(std::move(model)), beacon_res_(beacon_res_m) {
    model_.validate();
    auto [drone, beacon] = discretize_domains(plan_, drone_res_m, beacon_res_m);
    drone_ = std::move(drone);
    beacon_ = std::move(beacon);
    bc_ = build_connectivity(beacon_, drone_, model_, plan_);

    const double W = plan_.extent.x(), D = plan_.extent.y(), H = plan_.extent.z();
    surfaces_ = {
        {Vec3(0, 0, H), Vec3(W, 0, 0), Vec3(0, D, 0), Vec3(0, 0, -1)},      // ceiling
        {Vec3(0, 0, H / 2), Vec3(0, D, 0), Vec3(0, 0, H / 2), Vec3(1, 0, 0)},   // wall x=0
        {Vec3(W, 0, H / 2), Vec3(0, D, 0), Vec3(0, 0, H / 2), Vec3(-1, 0, 0)},  // wall x=W
        {Vec3(0, 0, H / 2), Vec3(W, 0, 0), Vec3(0, 0, H / 2), Vec3(0, 1, 0)},   // wall y=0
        {Vec3(0, D, H / 2), Vec3(W, 0, 0), Vec3(0, 0, H / 2), Vec3(0, -1, 0)},  // wall y=D
    };

    // Canonical footprint samples reused for every site's waste estimate:
    // uniform over the array's cone solids, mount-local coordinates.
    Rng wrng = make_rng(0x57a5'7e5aULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double cos_half = std::cos(model_.cone_half_angle_deg * std::numbers::pi / 180.0);
    const int kWasteSamples = 200;
    const int ndirs = static_cast<int>(model_.array_directions.size());
    for (int s = 0; s < kWasteSamples; ++s) {
        const Vec3 axis = model_.array_directions[s % ndirs];
        const double cd = 1.0 - uni(wrng) * (1.0 - cos_half);
        const double sd = std::sqrt(std::max(0.0, 1.0 - cd * cd));
        const double az = 2.0 * std::numbers::pi * uni(wrng);
        const Vec3 local_dev(sd * std::cos(az), sd * std::sin(az), cd);
        waste_dirs_.push_back(rotation_z_to(axis) * local_dev);
        waste_radii_.push_back(std::cbrt(uni(wrng)) * model_.range_m);
    }

    grid_waste_.resize(beacon_.sites.size());
    parallel_for(static_cast<int>(beacon_.sites.size()), [&](int i) {
        grid_waste_[i] = compute_entry(beacon_.sites[i]).waste;
    });
}

SiteGene PlacementProblem::sample_site(int surface_slot, Rng& rng) const {
    return sample_site_stratified(surface_slot, 0, 1, rng);
}

SiteGene PlacementProblem::sample_site_stratified(int surface_slot, int stratum, int n_strata,
                                                  Rng& rng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // jittered grid cell of the surface rectangle
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_strata))));
    const int rows = (n_strata + cols - 1) / cols;
    const int cu = stratum % cols, cv = stratum / cols;
    for (int attempt = 0; attempt < 5 * 256; ++attempt) {
        const Surface& s = surfaces_[(surface_slot + attempt / 256) % surfaces_.size()];
        double u = (cu + uni(rng)) / cols;
        double v = (cv + uni(rng)) / rows;
        if (attempt >= 64) {  // cell may sit inside an obstacle; widen
            u = uni(rng);
            v = uni(rng);
        }
        const Vec3 pos = s.origin + u * s.du + v * s.dv;
        bool blocked = false;
        for (const auto& obs : plan_.obstacles)
            if (obs.contains(pos)) blocked = true;
        if (!blocked) return SiteGene{BeaconSite::on_surface(pos, s.normal), -1};
    }
    throw InfeasibleError("cannot sample a beacon site outside obstacles");
}

PlacementProblem::CacheEntry PlacementProblem::compute_entry(const BeaconSite& site) const {
    CacheEntry e;
    e.row = Bitset(point_count());
    for (int j = 0; j < point_count(); ++j)
        if (beacon_covers(model_, site, drone_.points[j], plan_)) e.row.set(j);
    const Eigen::Matrix3d R = site.frame();
    int outside = 0;
    for (size_t s = 0; s < waste_dirs_.size(); ++s) {
        const Vec3 p = site.position + waste_radii_[s] * (R * waste_dirs_[s]);
        if (!plan_.in_flight_region(p)) ++outside;
    }
    e.waste = static_cast<double>(outside) / waste_dirs_.size();
    return e;
}

const PlacementProblem::CacheEntry& PlacementProblem::entry_for(const SiteGene& gene) const {
    const std::uint64_t key = quantize_key(gene.site);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto fresh = std::make_unique<CacheEntry>(compute_entry(gene.site));
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto [it, inserted] = cache_.try_emplace(key, std::move(fresh));
    return *it->second;
}

const Bitset& PlacementProblem::coverage_row(const SiteGene& gene) const {
    if (gene.grid_index >= 0) return bc_.rows[gene.grid_index];
    return entry_for(gene).row;
}

double PlacementProblem::waste_fraction(const SiteGene& gene) const {
    if (gene.grid_index >= 0) return grid_waste_[gene.grid_index];
    return entry_for(gene).waste;
}

double PlacementProblem::covered_gdop_avg(std::span<const SiteGene> genes) const {
    std::vector<const Bitset*> rows;
    std::vector<Vec3> positions;
    rows.reserve(genes.size());
    positions.reserve(genes.size());
    for (const auto& g : genes) {
        rows.push_back(&coverage_row(g));
        positions.push_back(g.site.position);
    }
    return covered_gdop_average(rows, positions, drone_.points);
}

SiteGene PlacementProblem::mutate_site(const SiteGene& gene, Rng& rng) const {
    // Identify the surface by the normal, displace in that surface's plane
    // with sigma of one beacon-grid cell, clamp to the legal rectangle.
    const Surface* surf = nullptr;
    for (const auto& s : surfaces_)
        if ((s.normal - gene.site.normal).norm() < 1e-9) surf = &s;
    if (surf == nullptr) return gene;
    std::normal_distribution<double> gauss(0.0, beacon_res_);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double ulen = surf->du.norm(), vlen = surf->dv.norm();
    const Vec3 rel = gene.site.position - surf->origin;
    const double u0 = rel.dot(surf->du) / (ulen * ulen), v0 = rel.dot(surf->dv) / (vlen * vlen);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double u = std::clamp(u0 + gauss(rng) / ulen, 0.0, 1.0);
        const double v = std::clamp(v0 + gauss(rng) / vlen, 0.0, 1.0);
        const Vec3 pos = surf->origin + u * surf->du + v * surf->dv;
        bool blocked = false;
        for (const auto& obs : plan_.obstacles)
            if (obs.contains(pos)) blocked = true;
        if (!blocked) return SiteGene{BeaconSite::on_surface(pos, surf->normal), -1};
    }
    return gene;
}

bool PlacementProblem::genes_coincide(const SiteGene& a, const SiteGene& b) const {
    return (a.site.position - b.site.position).lpNorm<Eigen::Infinity>() < kCoincideTol;
}

void PlacementProblem::check_feasible() const {
    for (int j = 0; j < bc_.n_points; ++j) {
        bool any = false;
        for (const auto& row : bc_.rows)
            if (row.test(j)) {
                any = true;
                break;
            }
        if (!any) {
            const Vec3& p = drone_.points[j];
            throw InfeasibleError("drone point (" + std::to_string(p.x()) + ", " +
                                  std::to_string(p.y()) + ", " + std::to_string(p.z()) +
                                  ") is covered by no candidate beacon site");
        }
    }
}

bool PlacementProblem::site_in_beacon_region(const BeaconSite& site, std::string* why) const {
    auto fail = [&](const char* msg) {
        if (why != nullptr) *why = msg;
        return false;
    };
    const double tol = 1e-9;
    const double W = plan_.extent.x(), D = plan_.extent.y(), H = plan_.extent.z();
    const Vec3& p = site.position;
    if (p.x() < -tol || p.x() > W + tol || p.y() < -tol || p.y() > D + tol || p.z() < -tol ||
        p.z() > H + tol)
        return fail("site outside the room");
    Vec3 expected_normal;
    if (std::abs(p.z() - H) <= tol) {
        expected_normal = Vec3(0, 0, -1);
    } else if (std::abs(p.x()) <= tol || std::abs(p.x() - W) <= tol || std::abs(p.y()) <= tol ||
               std::abs(p.y() - D) <= tol) {
        if (p.z() < H / 2 - tol) return fail("wall site below half the room height");
        if (std::abs(p.x()) <= tol)
            expected_normal = Vec3(1, 0, 0);
        else if (std::abs(p.x() - W) <= tol)
            expected_normal = Vec3(-1, 0, 0);
        else if (std::abs(p.y()) <= tol)
            expected_normal = Vec3(0, 1, 0);
        else
            expected_normal = Vec3(0, -1, 0);
    } else {
        return fail("site not on the ceiling or a wall");
    }
    if ((site.normal - expected_normal).norm() > 1e-6) return fail("normal does not point inward");
    for (const auto& obs : plan_.obstacles)
        if (obs.contains(p)) return fail("site inside an obstacle");
    return true;
}

MatrixProblem::MatrixProblem(ConnectivityMatrix bc) : bc_(std::move(bc)) {
    if (bc_.rows.empty() || bc_.n_points <= 0)
        throw ValidationError("matrix problem needs non-empty connectivity");
}

SiteGene MatrixProblem::sample_site(int, Rng& rng) const {
    std::uniform_int_distribution<int> pick(0, bc_.n_sites() - 1);
    SiteGene g;
    g.grid_index = pick(rng);
    return g;
}

const Bitset& MatrixProblem::coverage_row(const SiteGene& gene) const {
    return bc_.rows.at(gene.grid_index);
}

SiteGene MatrixProblem::mutate_site(const SiteGene& gene, Rng& rng) const {
    return sample_site(0, rng);
}

bool MatrixProblem::genes_coincide(const SiteGene& a, const SiteGene& b) const {
    return a.grid_index == b.grid_index;
}

void MatrixProblem::check_feasible() const {
    for (int j = 0; j < bc_.n_points; ++j)
        if (bc_.column_sum(j) == 0)
            throw InfeasibleError("point " + std::to_string(j) + " has no covering site");
}

}  // namespace beaconopt
