#include "beaconopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "beaconopt/errors.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/localization.hpp"
#include "beaconopt/parallel.hpp"
#include "beaconopt/rng.hpp"
#include "beaconopt/simplex.hpp"

namespace beaconopt {

namespace {

bool selection_k_covers(const ConnectivityMatrix& bc, std::span<const int> sel, int k) {
    std::vector<const Bitset*> rows;
    rows.reserve(sel.size());
    for (int i : sel) rows.push_back(&bc.rows[i]);
    return count_covered_at_least(rows, k, bc.n_points) == bc.n_points;
}

// Lexicographic combinations of size c over [0, n).
bool next_combination(std::vector<int>& idx, int n) {
    const int c = static_cast<int>(idx.size());
    for (int i = c - 1; i >= 0; --i) {
        if (idx[i] < n - c + i) {
            ++idx[i];
            for (int j = i + 1; j < c; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

MinCoverResult brute_force_min_cover(const ConnectivityMatrix& bc, int k, int max_sites) {
    if (k < 1) throw ValidationError("k must be at least 1");
    const int n = bc.n_sites();
    if (n > max_sites)
        throw SizeError("instance too large for exhaustive enumeration (" + std::to_string(n) +
                        " > " + std::to_string(max_sites) + " sites)");

    for (int j = 0; j < bc.n_points; ++j)
        if (bc.column_sum(j) < k) return {};  // infeasible marker

    // Start at the counting bound; every smaller subset is provably short.
    int max_row = 0;
    for (const auto& r : bc.rows) max_row = std::max(max_row, r.count());
    const int start = std::max(
        1, static_cast<int>(std::ceil(static_cast<double>(k) * bc.n_points / max_row)));

    for (int c = start; c <= n; ++c) {
        std::vector<int> idx(c);
        for (int i = 0; i < c; ++i) idx[i] = i;
        do {
            if (selection_k_covers(bc, idx, k)) return {true, c, idx};
        } while (next_combination(idx, n));
    }
    return {};
}

namespace {

// a subset-of b over equally sized bitsets
bool subset_of(const Bitset& a, const Bitset& b) {
    const auto& wa = a.words();
    const auto& wb = b.words();
    for (size_t i = 0; i < wa.size(); ++i)
        if (wa[i] & ~wb[i]) return false;
    return true;
}

struct Constraint {
    Bitset covering;  // over the kept sites
    int point = 0;
    int size = 0;
};

double coverage_sum(const Constraint& cons, const Eigen::VectorXd& x) {
    double s = 0.0;
    const auto& w = cons.covering.words();
    for (size_t wi = 0; wi < w.size(); ++wi) {
        std::uint64_t bits = w[wi];
        while (bits) {
            const int b = std::countr_zero(bits);
            s += x(static_cast<int>(wi) * 64 + b);
            bits &= bits - 1;
        }
    }
    return s;
}

}  // namespace

LowerBoundParts lower_bound_parts(const ConnectivityMatrix& bc, int k) {
    if (k < 1) throw ValidationError("k must be at least 1");
    const int n = bc.n_sites();
    const int m = bc.n_points;

    int max_row = 0;
    for (const auto& r : bc.rows) max_row = std::max(max_row, r.count());
    if (max_row == 0) throw InfeasibleError("no site covers any point");
    for (int j = 0; j < m; ++j)
        if (bc.column_sum(j) < k)
            throw InfeasibleError("point " + std::to_string(j) +
                                  " cannot reach k covering sites");

    LowerBoundParts parts;
    parts.counting =
        static_cast<int>(std::ceil(static_cast<double>(k) * m / max_row - 1e-9));

    // Column reduction: sites with identical coverage are interchangeable
    // and no point ever needs more than k of them, so each equality class
    // keeps at most k representatives. This leaves both the LP and the
    // integer optimum unchanged.
    std::vector<int> kept_sites;
    {
        auto equal_rows = [&](int a, int b) {
            return bc.rows[a].words() == bc.rows[b].words();
        };
        std::unordered_map<std::uint64_t, std::vector<int>> reps;  // hash -> class reps
        std::vector<int> kept_per_rep(n, 0);
        for (int i = 0; i < n; ++i) {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (auto w : bc.rows[i].words()) h = splitmix64(h ^ w);
            int rep = -1;
            for (int r : reps[h])
                if (equal_rows(i, r)) {
                    rep = r;
                    break;
                }
            if (rep < 0) {
                reps[h].push_back(i);
                rep = i;
            }
            if (kept_per_rep[rep] < k) {
                ++kept_per_rep[rep];
                kept_sites.push_back(i);
            }
        }
    }
    const int nk = static_cast<int>(kept_sites.size());

    // Constraint rows over the kept sites; dedupe, then drop rows whose
    // covering set contains another row's (they are implied).
    std::vector<Constraint> all;
    {
        std::unordered_map<std::uint64_t, int> seen;
        for (int j = 0; j < m; ++j) {
            Constraint cons;
            cons.covering = Bitset(nk);
            cons.point = j;
            for (int i = 0; i < nk; ++i)
                if (bc.rows[kept_sites[i]].test(j)) cons.covering.set(i);
            cons.size = cons.covering.count();
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (auto w : cons.covering.words()) h = splitmix64(h ^ w);
            if (seen.emplace(h, j).second) all.push_back(std::move(cons));
        }
        std::sort(all.begin(), all.end(), [](const Constraint& a, const Constraint& b) {
            return a.size != b.size ? a.size < b.size : a.point < b.point;
        });
        std::vector<Constraint> minimal;
        for (auto& cons : all) {
            bool implied = false;
            for (const auto& kept : minimal)
                if (subset_of(kept.covering, cons.covering)) {
                    implied = true;
                    break;
                }
            if (!implied) minimal.push_back(std::move(cons));
        }
        all = std::move(minimal);
    }

    // Row generation: start from the tightest constraints, add violated
    // ones until the LP solution satisfies every row. The working-set
    // optimum then equals the full LP optimum.
    std::vector<int> active;
    std::vector<bool> included(all.size(), false);
    for (size_t i = 0; i < std::min<std::size_t>(150, all.size()); ++i) {
        active.push_back(static_cast<int>(i));
        included[i] = true;
    }

    const Eigen::VectorXd c = Eigen::VectorXd::Ones(nk);
    const Eigen::VectorXd upper = Eigen::VectorXd::Ones(nk);
    Eigen::VectorXd dual_y;
    std::vector<int> dual_rows;
    for (int outer = 0;; ++outer) {
        Eigen::MatrixXd A(active.size(), nk);
        Eigen::VectorXd rhs(active.size());
        for (size_t r = 0; r < active.size(); ++r) {
            const auto& cons = all[active[r]];
            for (int i = 0; i < nk; ++i) A(r, i) = cons.covering.test(i) ? 1.0 : 0.0;
            rhs(r) = k;
        }
        LpResult lp = solve_covering_lp(A, rhs, c, upper);
        dual_y = lp.dual;
        dual_rows = active;

        std::vector<std::pair<double, int>> violated;
        for (size_t i = 0; i < all.size(); ++i) {
            if (included[i]) continue;
            const double s = coverage_sum(all[i], lp.x);
            if (s < k - 1e-7) violated.push_back({s, static_cast<int>(i)});
        }
        if (violated.empty()) break;
        std::sort(violated.begin(), violated.end());
        for (size_t i = 0; i < std::min<std::size_t>(100, violated.size()); ++i) {
            active.push_back(violated[i].second);
            included[violated[i].second] = true;
        }
        if (outer > static_cast<int>(all.size())) throw Error("row generation failed to converge");
    }

    // Certify over the original data by weak duality: any y >= 0 on the
    // point constraints gives min >= k sum(y) - sum_j max(0, (A'y)_j - 1),
    // with the penalty ranging over every original site.
    double bound = 0.0;
    std::vector<std::pair<int, double>> point_duals;  // (point index, y)
    for (size_t r = 0; r < dual_rows.size(); ++r)
        if (dual_y(static_cast<int>(r)) > 0) {
            point_duals.push_back({all[dual_rows[r]].point, dual_y(static_cast<int>(r))});
            bound += k * dual_y(static_cast<int>(r));
        }
    for (int i = 0; i < n; ++i) {
        double covered = 0.0;
        for (const auto& [pt, y] : point_duals)
            if (bc.rows[i].test(pt)) covered += y;
        bound -= std::max(0.0, covered - 1.0);
    }
    parts.lp = static_cast<int>(std::ceil(bound - 1e-6));
    return parts;
}

int lower_bound(const ConnectivityMatrix& bc, int k) {
    const auto parts = lower_bound_parts(bc, k);
    return std::max(parts.counting, parts.lp);
}

std::vector<SimReport> simulate_localization(const BeaconPlacement& placement,
                                             std::span<const Vec3> points, double sigma_r,
                                             int trials, std::uint64_t seed,
                                             const FloorPlan& plan, const SensorModel& model) {
    if (sigma_r < 0) throw ValidationError("sigma_r must be nonnegative");
    if (trials < 1) throw ValidationError("need at least one trial");

    std::vector<SimReport> reports;
    reports.reserve(points.size());
    for (size_t pi = 0; pi < points.size(); ++pi) {
        const Vec3& target = points[pi];
        std::vector<Vec3> covering;
        for (const auto& site : placement.selected_sites)
            if (beacon_covers(model, site, target, plan)) covering.push_back(site.position);
        if (covering.size() < 4)
            throw ValidationError("simulation point lacks 4 covering beacons");

        std::vector<double> true_ranges(covering.size());
        for (size_t i = 0; i < covering.size(); ++i)
            true_ranges[i] = (covering[i] - target).norm();
        const double gdop = gdop_at(target, covering).value;

        std::vector<double> err_sq(trials, 0.0);
        parallel_for(trials, [&](int t) {
            Rng trng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(pi),
                                         static_cast<std::uint64_t>(t)));
            std::normal_distribution<double> noise(0.0, 1.0);
            TrilaterationProblem prob;
            prob.measurements.reserve(covering.size());
            for (size_t i = 0; i < covering.size(); ++i) {
                const double d =
                    sigma_r > 0 ? true_ranges[i] + sigma_r * noise(trng) : true_ranges[i];
                prob.measurements.push_back({covering[i], std::max(0.0, d), 1.0});
            }
            const Vec3 est = trilaterate(prob);
            err_sq[t] = (est - target).squaredNorm();
        });
        double sum = 0.0;
        for (double e : err_sq) sum += e;  // fixed order

        SimReport rep;
        rep.point = target;
        rep.rmse_m = std::sqrt(sum / trials);
        rep.predicted_sigma_m = sigma_r * gdop;
        rep.ratio = rep.predicted_sigma_m > 0 ? rep.rmse_m / rep.predicted_sigma_m : 0.0;
        rep.trials = trials;
        rep.sigma_r = sigma_r;
        reports.push_back(rep);
    }
    return reports;
}

}  // namespace beaconopt
