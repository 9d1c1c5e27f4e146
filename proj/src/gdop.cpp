#include "beaconopt/gdop.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "beaconopt/coverage.hpp"
#include "beaconopt/errors.hpp"
#include "beaconopt/parallel.hpp"

namespace beaconopt {

const char* band_name(GdopBand band) {
    switch (band) {
        case GdopBand::ErrorOrRedundancy: return "error-or-redundancy";
        case GdopBand::Ideal: return "ideal";
        case GdopBand::VeryGood: return "very-good";
        case GdopBand::Good: return "good";
        case GdopBand::Medium: return "medium";
        case GdopBand::Sufficient: return "sufficient";
        case GdopBand::Bad: return "bad";
    }
    return "bad";
}

Eigen::MatrixXd direction_cosine_matrix(const Vec3& target, std::span<const Vec3> beacons) {
    Eigen::MatrixXd C(beacons.size(), 3);
    for (size_t i = 0; i < beacons.size(); ++i) {
        const Vec3 d = beacons[i] - target;
        const double r = d.norm();
        if (r < 1e-12) throw CoincidentPointError("beacon coincides with the target point");
        C.row(i) = (d / r).transpose();
    }
    return C;
}

GdopResult gdop_at(const Vec3& target, std::span<const Vec3> beacons) {
    if (beacons.size() < 3) throw ValidationError("gdop_at needs at least 3 beacons");
    const Eigen::MatrixXd C = direction_cosine_matrix(target, beacons);
    const Eigen::Matrix3d M = C.transpose() * C;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    const auto& ev = es.eigenvalues();
    GdopResult r;
    if (!(ev(0) > 0.0) || ev(2) / ev(0) > 1e12) {
        r.singular = true;
        r.value = kGdopCap;
        r.band = GdopBand::Bad;
        return r;
    }
    const Eigen::Matrix3d Q = M.inverse();
    r.singular = false;
    r.value = std::sqrt(Q(0, 0) + Q(1, 1) + Q(2, 2));
    r.band = classify_band(r.value);
    return r;
}

GdopBand classify_band(double value) {
    if (!(value > 0)) throw std::domain_error("GDOP value must be positive");
    if (value < 1) return GdopBand::ErrorOrRedundancy;
    if (value == 1) return GdopBand::Ideal;
    if (value <= 2) return GdopBand::VeryGood;
    if (value <= 5) return GdopBand::Good;
    if (value <= 10) return GdopBand::Medium;
    if (value <= 20) return GdopBand::Sufficient;
    return GdopBand::Bad;
}

GdopField gdop_field(const DroneDomain& domain, const BeaconPlacement& placement,
                     const FloorPlan& plan, const SensorModel& model) {
    const int n = static_cast<int>(domain.points.size());
    GdopField field;
    field.per_point.resize(n);
    std::vector<char> is_covered(n, 0);  // >= 4 covering beacons
    parallel_for(n, [&](int j) {
        const Vec3& p = domain.points[j];
        std::vector<Vec3> covering;
        for (const auto& site : placement.selected_sites)
            if (beacon_covers(model, site, p, plan)) covering.push_back(site.position);
        GdopResult r;
        if (covering.size() >= 4) {
            is_covered[j] = 1;
            r = gdop_at(p, covering);  // may still come back singular-capped
        }
        field.per_point[j] = r;
    });

    // Accumulate in domain index order so results are schedule-independent.
    double sum = 0.0, covered_sum = 0.0;
    int singular = 0, covered = 0;
    for (int j = 0; j < n; ++j) {
        const auto& r = field.per_point[j];
        sum += r.value;
        if (r.singular) ++singular;
        if (is_covered[j]) {
            covered_sum += r.value;
            ++covered;
        }
    }
    field.average = n > 0 ? sum / n : kGdopCap;
    field.covered_average = covered > 0 ? covered_sum / covered : kGdopCap;
    field.fraction_singular = n > 0 ? static_cast<double>(singular) / n : 1.0;
    return field;
}

double crb_2d(const Crb2dInput& input) {
    const auto& th = input.beacon_angles_rad;
    if (th.size() < 2) throw ValidationError("crb_2d needs at least 2 beacon angles");
    if (!(input.sigma_r > 0)) throw ValidationError("sigma_r must be positive");
    double sum = 0.0;
    for (size_t k = 0; k + 1 < th.size(); ++k)
        for (size_t j = k + 1; j < th.size(); ++j) sum += std::abs(std::sin(th[k] - th[j]));
    if (sum <= 0.0)
        throw DegenerateGeometryError("all beacons at identical or opposite bearings");
    return input.sigma_r * std::sqrt(static_cast<double>(th.size()) / sum);
}

double dop_2d_from_angles(std::span<const double> angles_rad) {
    if (angles_rad.size() < 2) throw ValidationError("need at least 2 bearing angles");
    double sum = 0.0;
    for (size_t k = 0; k + 1 < angles_rad.size(); ++k)
        for (size_t j = k + 1; j < angles_rad.size(); ++j) {
            const double s = std::sin(angles_rad[k] - angles_rad[j]);
            sum += s * s;
        }
    if (sum <= 0.0)
        throw DegenerateGeometryError("all beacons at identical or opposite bearings");
    return std::sqrt(static_cast<double>(angles_rad.size()) / sum);
}

}  // namespace beaconopt
