#pragma once

#include <Eigen/Dense>
#include <vector>

namespace beaconopt {

/// Result of min c'x s.t. Ax >= b, 0 <= x <= u.
struct LpResult {
    double objective = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd dual;             // y >= 0, one entry per row
    double certified_lower = 0.0;     // weak-duality bound from y, valid even
                                      // under numerical wobble
    int iterations = 0;
};

/// Dense bounded-variable revised simplex for covering LPs. Requires the
/// all-upper-bounds point to be feasible (A u >= b), which covering
/// instances satisfy after the feasibility pre-check.
LpResult solve_covering_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, const Eigen::VectorXd& upper);

}  // namespace beaconopt
