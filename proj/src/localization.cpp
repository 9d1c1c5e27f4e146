#include "beaconopt/localization.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "beaconopt/errors.hpp"

namespace beaconopt {

double range_from_toa(double time_of_flight_s, double speed_of_sound_mps) {
    if (time_of_flight_s < 0) throw std::domain_error("time of flight must be nonnegative");
    if (!(speed_of_sound_mps > 0)) throw std::domain_error("speed of sound must be positive");
    return speed_of_sound_mps * time_of_flight_s;
}

Vec3 trilaterate(const TrilaterationProblem& problem) {
    const auto& ms = problem.measurements;
    const int n = static_cast<int>(ms.size());
    if (n < 4) throw ValidationError("trilateration needs at least 4 measurements");
    for (const auto& m : ms) {
        if (m.distance_m < 0) throw ValidationError("negative range");
        if (m.weight < 0) throw ValidationError("negative weight");
    }

    const Vec3 pn = ms[n - 1].beacon_position;
    const double dn2 = ms[n - 1].distance_m * ms[n - 1].distance_m;
    const double pn2 = pn.squaredNorm();

    // Weighted rows: sqrt(w_i) * (A_i, b_i). Solving the scaled system by
    // QR equals the normal-equation form with W = diag(w).
    Eigen::MatrixXd A(n - 1, 3);
    Eigen::VectorXd b(n - 1);
    for (int i = 0; i < n - 1; ++i) {
        const Vec3 pi = ms[i].beacon_position;
        const double sw = std::sqrt(ms[i].weight);
        A.row(i) = sw * 2.0 * (pn - pi).transpose();
        b(i) = sw * (ms[i].distance_m * ms[i].distance_m - dn2 - pi.squaredNorm() + pn2);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    // cond(A^T W A) = (smax/smin)^2; reject above 1e12.
    if (!(smin > 0.0) || (smax / smin) * (smax / smin) > 1e12)
        throw DegenerateGeometryError(
            "trilateration geometry is degenerate (coplanar or coincident beacons)");
    return svd.solve(b);
}

}  // namespace beaconopt
