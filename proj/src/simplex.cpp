#include "beaconopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "beaconopt/errors.hpp"

namespace beaconopt {

// Upper-bounded tableau simplex for min c'x s.t. Ax >= b, 0 <= x <= u.
// Standard form Ax - s = b with s >= 0; the all-upper point (x = u,
// s = Au - b) is feasible for covering instances, so the surplus basis
// starts the method with no phase 1. Structural variables flip between
// their bounds instead of carrying explicit rows.
LpResult solve_covering_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, const Eigen::VectorXd& upper) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    const int cols = n + m;  // structural + surplus
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double tol = 1e-9;

    if ((A * upper - b).minCoeff() < -1e-9)
        throw InfeasibleError("covering LP infeasible even with every site selected");

    // T = B^-1 [A | -I | b]; initial basis = surplus (B = -I).
    Eigen::MatrixXd T(m, cols + 1);
    T.block(0, 0, m, n) = -A;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.col(cols) = -b;
    // reduced costs r = c - y'[A|-I], y = 0 initially
    Eigen::VectorXd r = Eigen::VectorXd::Zero(cols);
    r.head(n) = c;

    std::vector<int> basis(m);
    std::vector<bool> in_basis(cols, false);
    std::vector<bool> at_upper(cols, false);
    for (int i = 0; i < m; ++i) {
        basis[i] = n + i;
        in_basis[n + i] = true;
    }
    for (int j = 0; j < n; ++j) at_upper[j] = true;

    auto upper_of = [&](int j) { return j < n ? upper(j) : kInf; };
    auto recompute_xb = [&]() {
        Eigen::VectorXd xb = T.col(cols);
        for (int j = 0; j < n; ++j)
            if (!in_basis[j] && at_upper[j] && upper(j) != 0.0) xb -= T.col(j) * upper(j);
        return xb;
    };
    Eigen::VectorXd xb = recompute_xb();
    if (xb.minCoeff() < -1e-7) throw Error("covering LP lost feasibility at the start");

    long degenerate = 0;
    const long max_iter = 100L * (m + n) + 20000;
    LpResult res;
    for (long iter = 0; iter < max_iter; ++iter) {
        const bool bland = degenerate > 2L * (m + n) + 500;
        int enter = -1;
        double worst = tol;
        for (int j = 0; j < cols; ++j) {
            if (in_basis[j]) continue;
            const double viol = at_upper[j] ? r(j) : -r(j);
            if (viol <= tol) continue;
            if (bland) {
                enter = j;
                break;
            }
            if (viol > worst) {
                worst = viol;
                enter = j;
            }
        }
        if (enter < 0) break;  // optimal
        res.iterations = static_cast<int>(iter) + 1;

        const double sigma = at_upper[enter] ? -1.0 : 1.0;
        double t_best = upper_of(enter);  // bound flip distance
        int leave = -1;
        bool leave_at_upper = false;
        for (int i = 0; i < m; ++i) {
            const double step = sigma * T(i, enter);
            if (step > tol) {
                const double t = xb(i) / step;
                if (t < t_best) {
                    t_best = t;
                    leave = i;
                    leave_at_upper = false;
                }
            } else if (step < -tol && upper_of(basis[i]) != kInf) {
                const double t = (upper_of(basis[i]) - xb(i)) / (-step);
                if (t < t_best) {
                    t_best = t;
                    leave = i;
                    leave_at_upper = true;
                }
            }
        }
        if (t_best == kInf) throw Error("covering LP unbounded (should not happen)");
        if (t_best < 0) t_best = 0;
        degenerate = t_best <= tol ? degenerate + 1 : 0;

        if (leave < 0) {
            // entering variable traverses to its other bound
            at_upper[enter] = !at_upper[enter];
            xb -= sigma * t_best * T.col(enter);
            continue;
        }

        const int out = basis[leave];
        in_basis[out] = false;
        at_upper[out] = leave_at_upper;
        basis[leave] = enter;
        in_basis[enter] = true;
        at_upper[enter] = false;  // basic now

        const double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double f = T(i, enter);
            if (f != 0.0) T.row(i) -= f * T.row(leave);
        }
        const double rf = r(enter);
        if (rf != 0.0) r -= rf * T.row(leave).head(cols).transpose();

        xb = recompute_xb();
        if (iter % 512 == 511 && xb.minCoeff() < -1e-6)
            throw Error("covering LP basic solution went negative");
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j)
        if (!in_basis[j] && at_upper[j]) x(j) = upper(j);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) x(basis[i]) = xb(i);
    for (int j = 0; j < n; ++j) x(j) = std::clamp(x(j), 0.0, upper(j));
    res.x = x;
    res.objective = c.dot(x);

    // Surplus reduced costs equal the duals: r_{s_i} = 0 - y'(-e_i) = y_i.
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y(i) = std::max(0.0, r(n + i));
    res.dual = y;
    double bound = y.dot(b);
    const Eigen::VectorXd slack = A.transpose() * y - c;
    for (int j = 0; j < n; ++j) bound -= upper(j) * std::max(0.0, slack(j));
    res.certified_lower = bound;
    return res;
}

}  // namespace beaconopt
