#include <random>

#include "beaconopt/errors.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/oracle.hpp"
#include "beaconopt/problem.hpp"
#include "beaconopt/stage1.hpp"
#include "doctest.h"

using namespace beaconopt;

namespace {

ConnectivityMatrix from_bools(const std::vector<std::vector<bool>>& m) {
    ConnectivityMatrix bc;
    bc.n_points = static_cast<int>(m.at(0).size());
    for (const auto& row : m) {
        Bitset b(bc.n_points);
        for (int j = 0; j < bc.n_points; ++j)
            if (row[j]) b.set(j);
        bc.rows.push_back(std::move(b));
    }
    return bc;
}

ConnectivityMatrix random_feasible_bc(std::mt19937_64& rng, int sites, int points,
                                      double density, int k) {
    std::uniform_real_distribution<double> u01(0, 1);
    for (;;) {
        std::vector<std::vector<bool>> m(sites, std::vector<bool>(points, false));
        for (auto& row : m)
            for (int j = 0; j < points; ++j) row[j] = u01(rng) < density;
        auto bc = from_bools(m);
        bool ok = true;
        for (int j = 0; j < points; ++j)
            if (bc.column_sum(j) < k) ok = false;
        if (ok) return bc;
    }
}

EaConfig small_config(std::uint64_t seed, int k) {
    EaConfig cfg;
    cfg.population_size_p = 60;
    cfg.survivor_count_s = 5;
    cfg.k_target = k;
    cfg.rng_seed = seed;
    cfg.max_generations = 200;
    return cfg;
}

PlacementProblem coarse_room() {
    FloorPlan plan;
    plan.extent = Vec3(3, 3, 4);
    return PlacementProblem(plan, SensorModel::defaults(), 0.5, 0.5);
}

}  // namespace

TEST_CASE("spawn_offspring: counts, growth, determinism") {
    auto problem = coarse_room();
    EaConfig cfg = small_config(5, 4);
    cfg.population_size_p = 250;
    Rng rng = make_rng(1);
    std::vector<Individual> parents(5);
    for (auto& p : parents) p.genes.push_back(problem.sample_site(0, rng));
    for (auto& p : parents) p.genes.push_back(problem.sample_site(1, rng));
    for (auto& p : parents) p.genes.push_back(problem.sample_site(2, rng));

    Rng r1 = make_rng(42);
    const auto off1 = spawn_offspring(parents, problem, 250 / 5, r1);
    CHECK(off1.size() == 250);
    for (const auto& o : off1) CHECK(o.genes.size() == 4);  // parent had 3

    Rng r2 = make_rng(42);
    const auto off2 = spawn_offspring(parents, problem, 250 / 5, r2);
    REQUIRE(off2.size() == off1.size());
    for (size_t i = 0; i < off1.size(); ++i)
        CHECK((off1[i].genes.back().site.position - off2[i].genes.back().site.position).norm() ==
              0.0);
}

TEST_CASE("stage1_fitness: lexicographic ordering") {
    Stage1Score a{0.9, -5.0, -kGdopCap};
    Stage1Score b{0.8, 100.0, 0.0};
    CHECK(stage1_score_better(a, b));  // coverage dominates

    Stage1Score c{0.8, 0.5, -kGdopCap};
    Stage1Score d{0.8, 0.1, -kGdopCap};
    CHECK(stage1_score_better(c, d));  // waste tie-break

    Stage1Score e{1.0, 0.5, -3.0};
    Stage1Score f{1.0, 0.5, -8.0};
    CHECK(stage1_score_better(e, f));  // GDOP tie-break at full coverage
}

TEST_CASE("select_survivors: top-s, deterministic ties") {
    std::vector<Individual> scored(250);
    for (int i = 0; i < 250; ++i) {
        scored[i].order = i;
        scored[i].score = {static_cast<double>(i % 50) / 50.0, 0.0, 0.0};
        scored[i].genes.resize(3);
    }
    const auto top = select_survivors(scored, 5);
    CHECK(top.size() == 5);
    for (const auto& s : top) CHECK(s.score.coverage == doctest::Approx(49.0 / 50.0));

    // all scores identical: first s by insertion order
    for (auto& ind : scored) ind.score = {0.5, 0.0, 0.0};
    const auto ties = select_survivors(scored, 5);
    for (int i = 0; i < 5; ++i) CHECK(ties[i].order == i);

    // s equal to the pool size is the identity up to ordering
    const auto all = select_survivors(scored, 250);
    CHECK(all.size() == 250);
}

TEST_CASE("run_stage1: tiny synthetic instance close to the exhaustive optimum") {
    std::mt19937_64 rng(67);
    const auto bc = random_feasible_bc(rng, 8, 6, 0.55, 2);
    const auto exact = brute_force_min_cover(bc, 2);
    REQUIRE(exact.feasible);

    MatrixProblem problem(bc);
    const auto result = run_stage1(problem, small_config(3, 2));
    CHECK(result.beacon_count >= exact.count);
    CHECK(result.beacon_count <= exact.count + 1);
    for (const auto& c : result.candidates) CHECK(c.genes.size() == result.candidates[0].genes.size());
}

TEST_CASE("run_stage1: deterministic for a fixed seed") {
    std::mt19937_64 rng(71);
    const auto bc = random_feasible_bc(rng, 12, 10, 0.5, 3);
    MatrixProblem problem(bc);
    const auto r1 = run_stage1(problem, small_config(9, 3));
    const auto r2 = run_stage1(problem, small_config(9, 3));
    CHECK(r1.beacon_count == r2.beacon_count);
    CHECK(r1.generations == r2.generations);
    REQUIRE(r1.candidates.size() == r2.candidates.size());
    for (size_t i = 0; i < r1.candidates.size(); ++i)
        for (size_t g = 0; g < r1.candidates[i].genes.size(); ++g)
            CHECK(r1.candidates[i].genes[g].grid_index == r2.candidates[i].genes[g].grid_index);
}

TEST_CASE("run_stage1: infeasible instance detected up front") {
    auto m = std::vector<std::vector<bool>>(6, std::vector<bool>(4, true));
    for (auto& row : m) row[2] = false;  // point 2 uncoverable
    MatrixProblem problem(from_bools(m));
    CHECK_THROWS_AS(run_stage1(problem, small_config(1, 1)), InfeasibleError);
}

TEST_CASE("run_stage1: stage progression and monotone best fitness") {
    auto problem = coarse_room();
    EaConfig cfg = small_config(13, 4);
    const auto result = run_stage1(problem, cfg);

    // full 4-connectivity reached
    bool any_full = false;
    for (const auto& c : result.candidates)
        if (c.per_k_fractions[3] == 1.0) any_full = true;
    CHECK(any_full);

    // within each k stage the best score never degrades (elitism)
    for (size_t i = 1; i < result.trace.size(); ++i) {
        const auto& prev = result.trace[i - 1];
        const auto& cur = result.trace[i];
        if (prev.k == cur.k) CHECK(!stage1_score_better(prev.best_score, cur.best_score));
    }

    // every candidate respects the beacon-domain invariants
    for (const auto& c : result.candidates)
        for (const auto& g : c.genes) CHECK(problem.site_in_beacon_region(g.site));

    // lower-bound sandwich
    const int lb = lower_bound(problem.connectivity(), 4);
    CHECK(result.beacon_count >= lb);
}

TEST_CASE("run_stage1: EA never beats the exhaustive optimum on random instances") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 4);
        const auto bc = random_feasible_bc(rng, 10, 8, 0.5, k);
        const auto exact = brute_force_min_cover(bc, k);
        REQUIRE(exact.feasible);
        MatrixProblem problem(bc);
        const auto result = run_stage1(problem, small_config(100 + trial, k));
        CHECK(result.beacon_count >= exact.count);
    }
}

TEST_CASE("run_stage1: generation limit raises non-convergence") {
    // 1-coverage needs at least three of these sites; one generation of
    // growth (two beacons total) cannot reach it.
    const auto bc = from_bools({{true, false, false, false, false, false},
                                {false, true, false, false, false, false},
                                {false, false, true, true, false, false},
                                {false, false, false, false, true, true}});
    MatrixProblem problem(bc);
    EaConfig cfg = small_config(1, 1);
    cfg.max_generations = 1;
    CHECK_THROWS_AS(run_stage1(problem, cfg), NonConvergenceError);
}

TEST_CASE("EaConfig validation") {
    EaConfig cfg;
    cfg.population_size_p = 250;
    cfg.survivor_count_s = 7;  // does not divide 250
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.survivor_count_s = 5;
    CHECK_NOTHROW(cfg.validate());
    cfg.coverage_threshold = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
