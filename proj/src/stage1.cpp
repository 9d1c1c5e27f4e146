#include "beaconopt/stage1.hpp"

#include <algorithm>
#include <string>

#include "beaconopt/errors.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/parallel.hpp"

namespace beaconopt {

bool stage1_score_better(const Stage1Score& a, const Stage1Score& b) {
    if (a.coverage != b.coverage) return a.coverage > b.coverage;
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.gdop_rank > b.gdop_rank;
}

Stage1Score stage1_fitness(const SolverProblem& problem, Individual& ind, int current_k,
                           int k_target) {
    std::vector<const Bitset*> rows;
    rows.reserve(ind.genes.size());
    double waste_sum = 0.0;
    for (const auto& g : ind.genes) {
        rows.push_back(&problem.coverage_row(g));
        waste_sum += problem.waste_fraction(g);
    }
    ind.per_k_fractions = coverage_fractions(rows, k_target, problem.point_count());
    Stage1Score s;
    s.coverage = ind.per_k_fractions[current_k - 1];
    // Total in-domain coverage as mass toward the k target: the mean of the
    // per-k fractions. Unlike the plain 1-coverage fraction this keeps
    // rewarding additions that lift points still short of the target, so
    // multi-step repairs are never discarded by selection.
    double mass = 0.0;
    for (double f : ind.per_k_fractions) mass += f;
    s.utility = mass / k_target - waste_sum;
    s.gdop_rank = -kGdopCap;
    if (current_k == k_target && s.coverage == 1.0 && problem.supports_gdop())
        s.gdop_rank = -problem.covered_gdop_avg(ind.genes);
    ind.score = s;
    return s;
}

std::vector<Individual> spawn_offspring(const std::vector<Individual>& parents,
                                        const SolverProblem& problem, int offspring_per_parent,
                                        Rng& rng) {
    std::vector<Individual> offspring;
    offspring.reserve(parents.size() * offspring_per_parent);
    const int nsurf = problem.surface_count();
    const int n_strata = (offspring_per_parent + nsurf - 1) / nsurf;
    for (const auto& parent : parents) {
        for (int j = 0; j < offspring_per_parent; ++j) {
            Individual child;
            child.genes = parent.genes;
            SiteGene gene =
                problem.sample_site_stratified(j % nsurf, j / nsurf, n_strata, rng);
            for (int attempt = 0; attempt < 64; ++attempt) {
                bool dup = false;
                for (const auto& g : child.genes)
                    if (problem.genes_coincide(g, gene)) dup = true;
                if (!dup) break;
                gene = problem.sample_site((j + attempt + 1) % nsurf, rng);
            }
            child.genes.push_back(gene);
            offspring.push_back(std::move(child));
        }
    }
    return offspring;
}

std::vector<Individual> select_survivors(std::vector<Individual> scored, int s) {
    if (s > static_cast<int>(scored.size()))
        throw ValidationError("cannot select more survivors than individuals");
    std::sort(scored.begin(), scored.end(), [](const Individual& a, const Individual& b) {
        if (stage1_score_better(a.score, b.score)) return true;
        if (stage1_score_better(b.score, a.score)) return false;
        if (a.genes.size() != b.genes.size()) return a.genes.size() < b.genes.size();
        return a.order < b.order;
    });
    scored.resize(s);
    return scored;
}

namespace {

void evaluate_all(const SolverProblem& problem, std::vector<Individual>& pool, int current_k,
                  int k_target) {
    parallel_for(static_cast<int>(pool.size()),
                 [&](int i) { stage1_fitness(problem, pool[i], current_k, k_target); });
}

bool fully_covered(const SolverProblem& problem, const std::vector<SiteGene>& genes, int k) {
    std::vector<const Bitset*> rows;
    rows.reserve(genes.size());
    for (const auto& g : genes) rows.push_back(&problem.coverage_row(g));
    return count_covered_at_least(rows, k, problem.point_count()) == problem.point_count();
}

}  // namespace

std::vector<SiteGene> reduce_redundancy(const SolverProblem& problem,
                                        std::vector<SiteGene> genes, int k) {
    const int n_points = problem.point_count();
    auto drop_singles = [&] {
        bool removed = true;
        while (removed && genes.size() > static_cast<size_t>(k)) {
            removed = false;
            for (size_t g = 0; g < genes.size(); ++g) {
                std::vector<SiteGene> rest = genes;
                rest.erase(rest.begin() + g);
                if (fully_covered(problem, rest, k)) {
                    genes = std::move(rest);
                    removed = true;
                    break;
                }
            }
        }
    };
    drop_singles();

    // 2-to-1 exchange: replace a beacon pair by one grid site whenever that
    // keeps every point at k coverage.
    const ConnectivityMatrix& grid = problem.candidate_grid();
    bool improved = true;
    while (improved && genes.size() > static_cast<size_t>(k)) {
        improved = false;
        for (size_t a = 0; a < genes.size() && !improved; ++a) {
            for (size_t b = a + 1; b < genes.size() && !improved; ++b) {
                // per-point coverage counts without the pair
                std::vector<const Bitset*> rest;
                for (size_t o = 0; o < genes.size(); ++o)
                    if (o != a && o != b) rest.push_back(&problem.coverage_row(genes[o]));
                // points short of k by exactly one must all be covered by
                // the replacement; a deficit of two is unfixable
                Bitset need(n_points);
                bool fixable = true;
                {
                    std::vector<int> counts(n_points, 0);
                    for (const Bitset* r : rest)
                        for (int j = 0; j < n_points; ++j)
                            if (r->test(j)) ++counts[j];
                    for (int j = 0; j < n_points && fixable; ++j) {
                        if (counts[j] >= k) continue;
                        if (counts[j] == k - 1)
                            need.set(j);
                        else
                            fixable = false;
                    }
                }
                if (!fixable) continue;
                for (int s = 0; s < grid.n_sites(); ++s) {
                    const Bitset& row = grid.rows[s];
                    bool covers_all = true;
                    for (size_t w = 0; w < need.words().size(); ++w)
                        if (need.words()[w] & ~row.words()[w]) {
                            covers_all = false;
                            break;
                        }
                    if (!covers_all) continue;
                    SiteGene cand = problem.gene_from_grid(s);
                    bool dup = false;
                    for (size_t o = 0; o < genes.size(); ++o)
                        if (o != a && o != b && problem.genes_coincide(genes[o], cand))
                            dup = true;
                    if (dup) continue;
                    std::vector<SiteGene> next;
                    for (size_t o = 0; o < genes.size(); ++o)
                        if (o != a && o != b) next.push_back(genes[o]);
                    next.push_back(cand);
                    if (!fully_covered(problem, next, k)) continue;
                    genes = std::move(next);
                    improved = true;
                    break;
                }
            }
        }
        if (improved) drop_singles();
    }
    return genes;
}

StageOneResult run_stage1(const SolverProblem& problem, const EaConfig& config) {
    config.validate();
    problem.check_feasible();
    Rng rng = make_rng(config.rng_seed);

    StageOneResult result;
    const int P = config.population_size_p;
    const int S = config.survivor_count_s;
    const int kt = config.k_target;
    const int nsurf = problem.surface_count();

    // Initial generation: P single-beacon individuals, surfaces visited
    // round-robin so every surface gets an equal share.
    std::vector<Individual> init;
    init.reserve(P);
    for (int i = 0; i < P; ++i) {
        Individual ind;
        ind.genes.push_back(problem.sample_site(i % nsurf, rng));
        ind.order = i;
        init.push_back(std::move(ind));
    }
    evaluate_all(problem, init, 1, kt);
    std::vector<Individual> parents = select_survivors(std::move(init), S);
    ++result.generations;

    for (int k = 1; k <= kt; ++k) {
        // Re-rank carried survivors under the new stage's fitness.
        for (auto& p : parents) stage1_fitness(problem, p, k, kt);

        int gens_this_k = 0;
        auto stage_done = [&] {
            for (const auto& p : parents)
                if (p.per_k_fractions[k - 1] == 1.0) return true;
            return false;
        };
        while (!stage_done()) {
            if (gens_this_k >= config.max_generations)
                throw NonConvergenceError("stage 1 hit the generation limit at connectivity k=" +
                                          std::to_string(k));
            std::vector<Individual> pool = parents;
            auto offspring = spawn_offspring(parents, problem, P / S, rng);
            for (auto& c : offspring) pool.push_back(std::move(c));
            for (size_t i = 0; i < pool.size(); ++i) pool[i].order = static_cast<int>(i);
            evaluate_all(problem, pool, k, kt);
            parents = select_survivors(std::move(pool), S);
            ++gens_this_k;
            ++result.generations;
            result.trace.push_back({k, result.generations, parents[0].score,
                                    parents[0].per_k_fractions[k - 1],
                                    static_cast<int>(parents[0].genes.size())});
        }
    }

    // Redundancy elimination on full-coverage survivors.
    if (config.prune_enabled) {
        for (auto& p : parents) {
            if (p.per_k_fractions[kt - 1] != 1.0) continue;
            p.genes = reduce_redundancy(problem, std::move(p.genes), kt);
            stage1_fitness(problem, p, kt, kt);
        }
    }

    // Minimal beacon count among full-coverage survivors defines N.
    size_t n_min = SIZE_MAX;
    for (const auto& p : parents)
        if (p.per_k_fractions[kt - 1] == 1.0) n_min = std::min(n_min, p.genes.size());
    for (const auto& p : parents) {
        if (p.genes.size() != n_min) continue;
        const double f = p.per_k_fractions[kt - 1];
        if (f == 1.0 || f >= config.coverage_threshold)
            result.candidates.push_back({p.genes, p.per_k_fractions});
    }
    result.beacon_count = static_cast<int>(n_min);
    return result;
}

}  // namespace beaconopt
