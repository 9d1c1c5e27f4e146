#pragma once

#include <vector>

#include "beaconopt/errors.hpp"
#include "beaconopt/gdop.hpp"
#include "beaconopt/problem.hpp"
#include "beaconopt/stage1.hpp"

namespace beaconopt {

/// Stage-2 fitness: k-connectivity coverage (clamped at the configured
/// threshold, higher better), then GDOP average (lower better). Clamping
/// lets sub-threshold coverage dominate while treating every placement at
/// or above the threshold as equal on coverage, so the GDOP trade-off can
/// be explored.
struct Stage2Score {
    double coverage = 0.0;  // raw k_target-connectivity fraction
    double gdop_avg = kGdopCap;
};

bool stage2_score_better(const Stage2Score& a, const Stage2Score& b, double coverage_threshold);

Stage2Score stage2_fitness(const SolverProblem& problem, std::span<const SiteGene> genes,
                           int k_target);

/// Uniform crossover over position-sorted beacon lists of equal length;
/// offspring keeps exactly N beacons and never duplicates a site.
std::vector<SiteGene> crossover(const SolverProblem& problem, std::span<const SiteGene> parent_a,
                                std::span<const SiteGene> parent_b, Rng& rng);

struct Stage2Trace {
    int generation = 0;
    Stage2Score best;
};

struct StageTwoResult {
    CandidatePlacement best;
    double coverage = 0.0;
    double gdop_avg = kGdopCap;
    int generations = 0;
    std::vector<CandidatePlacement> alternates;  // remaining survivors
    std::vector<Stage2Trace> trace;
};

/// Thrown when stage 2 exhausts its generations; carries the best placement
/// found so far.
class Stage2NonConvergence : public NonConvergenceError {
public:
    Stage2NonConvergence(const std::string& msg, StageTwoResult best)
        : NonConvergenceError(msg), best_found(std::move(best)) {}
    StageTwoResult best_found;
};

/// Refine equal-count candidates by crossover (plus optional positional
/// mutation) until one satisfies both stop conditions: k_target coverage at
/// or above the threshold and GDOP average at or below g.
StageTwoResult run_stage2(const SolverProblem& problem,
                          const std::vector<CandidatePlacement>& candidates,
                          const EaConfig& config);

}  // namespace beaconopt
