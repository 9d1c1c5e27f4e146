#pragma once

#include <vector>

#include "beaconopt/problem.hpp"

namespace beaconopt {

/// Lexicographic fitness, higher is better on every component:
/// (1) coverage fraction at the current connectivity stage,
/// (2) total in-domain coverage minus the summed waste of the beacons,
/// (3) negated GDOP average, active only for full-coverage individuals at
///     the final stage (sentinel -kGdopCap otherwise).
struct Stage1Score {
    double coverage = 0.0;
    double utility = 0.0;
    double gdop_rank = 0.0;
};

bool stage1_score_better(const Stage1Score& a, const Stage1Score& b);

struct Individual {
    std::vector<SiteGene> genes;
    std::vector<double> per_k_fractions;  // k = 1..k_target
    Stage1Score score;
    int order = 0;  // insertion index, final tie-break
};

struct CandidatePlacement {
    std::vector<SiteGene> genes;
    std::vector<double> per_k_fractions;
};

struct GenerationTrace {
    int k = 0;
    int generation = 0;
    Stage1Score best_score;
    double best_coverage = 0.0;
    int best_count = 0;
};

struct StageOneResult {
    std::vector<CandidatePlacement> candidates;  // equal beacon count N
    int beacon_count = 0;
    int generations = 0;
    std::vector<GenerationTrace> trace;
};

/// Score one individual at connectivity stage current_k (fills
/// per_k_fractions as a side effect of evaluation).
Stage1Score stage1_fitness(const SolverProblem& problem, Individual& ind, int current_k,
                           int k_target);

/// Each parent yields offspring_per_parent children, every child being the
/// parent plus one beacon sampled round-robin across the surfaces.
std::vector<Individual> spawn_offspring(const std::vector<Individual>& parents,
                                        const SolverProblem& problem, int offspring_per_parent,
                                        Rng& rng);

/// The s best individuals in descending fitness; ties by fewer beacons,
/// then insertion order.
std::vector<Individual> select_survivors(std::vector<Individual> scored, int s);

/// Remove provably superfluous beacons from a full-coverage placement:
/// single removals plus 2-to-1 exchanges against the candidate grid, until
/// a fixpoint. Coverage at k never drops below full.
std::vector<SiteGene> reduce_redundancy(const SolverProblem& problem,
                                        std::vector<SiteGene> genes, int k);

/// Staged k-connectivity minimization (k = 1..k_target): grows placements
/// one beacon per generation until some survivor reaches full coverage at
/// each stage. Returns up to survivor_count placements with the minimal
/// found beacon count; at least one has full k_target coverage, the rest
/// meet the coverage threshold.
StageOneResult run_stage1(const SolverProblem& problem, const EaConfig& config);

}  // namespace beaconopt
