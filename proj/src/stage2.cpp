#include "beaconopt/stage2.hpp"

#include <algorithm>
#include <string>

#include "beaconopt/gdop.hpp"
#include "beaconopt/parallel.hpp"

namespace beaconopt {

bool stage2_score_better(const Stage2Score& a, const Stage2Score& b, double coverage_threshold) {
    const double ca = std::min(a.coverage, coverage_threshold);
    const double cb = std::min(b.coverage, coverage_threshold);
    if (ca != cb) return ca > cb;
    return a.gdop_avg < b.gdop_avg;
}

Stage2Score stage2_fitness(const SolverProblem& problem, std::span<const SiteGene> genes,
                           int k_target) {
    std::vector<const Bitset*> rows;
    rows.reserve(genes.size());
    for (const auto& g : genes) rows.push_back(&problem.coverage_row(g));
    Stage2Score s;
    s.coverage = coverage_fractions(rows, k_target, problem.point_count())[k_target - 1];
    s.gdop_avg = problem.covered_gdop_avg(genes);
    return s;
}

std::vector<SiteGene> crossover(const SolverProblem& problem, std::span<const SiteGene> parent_a,
                                std::span<const SiteGene> parent_b, Rng& rng) {
    if (parent_a.size() != parent_b.size())
        throw ValidationError("crossover parents must have equal beacon counts");
    auto sorted = [](std::span<const SiteGene> genes) {
        std::vector<SiteGene> v(genes.begin(), genes.end());
        std::sort(v.begin(), v.end(), [](const SiteGene& x, const SiteGene& y) {
            const Vec3 &p = x.site.position, &q = y.site.position;
            if (p.x() != q.x()) return p.x() < q.x();
            if (p.y() != q.y()) return p.y() < q.y();
            return p.z() < q.z();
        });
        return v;
    };
    const auto a = sorted(parent_a), b = sorted(parent_b);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<SiteGene> child;
    child.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        auto dup = [&](const SiteGene& g) {
            for (const auto& c : child)
                if (problem.genes_coincide(c, g)) return true;
            return false;
        };
        const int choice = coin(rng);
        SiteGene pick = choice == 0 ? a[i] : b[i];
        if (dup(pick)) pick = choice == 0 ? b[i] : a[i];
        for (int attempt = 0; dup(pick) && attempt < 64; ++attempt)
            pick = problem.sample_site(static_cast<int>(i) % problem.surface_count(), rng);
        child.push_back(pick);
    }
    return child;
}

namespace {

struct Entrant {
    std::vector<SiteGene> genes;
    Stage2Score score;
    int order = 0;
};

void sort_pool(std::vector<Entrant>& pool, double threshold) {
    std::sort(pool.begin(), pool.end(), [&](const Entrant& x, const Entrant& y) {
        if (stage2_score_better(x.score, y.score, threshold)) return true;
        if (stage2_score_better(y.score, x.score, threshold)) return false;
        return x.order < y.order;
    });
}

CandidatePlacement to_candidate(const SolverProblem& problem, const Entrant& e, int k_target) {
    std::vector<const Bitset*> rows;
    for (const auto& g : e.genes) rows.push_back(&problem.coverage_row(g));
    return {e.genes, coverage_fractions(rows, k_target, problem.point_count())};
}

StageTwoResult make_result(const SolverProblem& problem, const std::vector<Entrant>& pool,
                           int generations, int k_target, std::vector<Stage2Trace> trace) {
    StageTwoResult r;
    r.best = to_candidate(problem, pool[0], k_target);
    r.coverage = pool[0].score.coverage;
    r.gdop_avg = pool[0].score.gdop_avg;
    r.generations = generations;
    r.trace = std::move(trace);
    for (size_t i = 1; i < pool.size(); ++i)
        r.alternates.push_back(to_candidate(problem, pool[i], k_target));
    return r;
}

}  // namespace

StageTwoResult run_stage2(const SolverProblem& problem,
                          const std::vector<CandidatePlacement>& candidates,
                          const EaConfig& config) {
    config.validate();
    if (candidates.empty()) throw ValidationError("stage 2 needs at least one candidate");
    const size_t N = candidates[0].genes.size();
    for (const auto& c : candidates)
        if (c.genes.size() != N)
            throw ValidationError("stage 2 candidates must share one beacon count");
    if (!problem.supports_gdop())
        throw ValidationError("stage 2 requires a geometry-backed problem");

    Rng rng = make_rng(mix_seed(config.rng_seed, 0x5742'67e2ULL));
    const int C = config.survivor_count_s;
    const int kt = config.k_target;
    const double threshold = config.coverage_threshold;

    auto evaluate = [&](std::vector<Entrant>& es) {
        parallel_for(static_cast<int>(es.size()),
                     [&](int i) { es[i].score = stage2_fitness(problem, es[i].genes, kt); });
    };
    auto satisfied = [&](const Stage2Score& s) {
        return s.coverage >= threshold - 1e-12 && s.gdop_avg <= config.gdop_threshold_g;
    };

    // Score the raw candidates first: if one already meets both stop
    // conditions it is returned unchanged in zero generations.
    std::vector<Entrant> pool;
    for (size_t i = 0; i < candidates.size(); ++i)
        pool.push_back(Entrant{candidates[i].genes, Stage2Score{}, static_cast<int>(i)});
    evaluate(pool);
    sort_pool(pool, threshold);
    std::vector<Stage2Trace> trace;
    if (satisfied(pool[0].score)) return make_result(problem, pool, 0, kt, std::move(trace));

    // Refill to C individuals with (optionally mutated) copies.
    {
        size_t base = pool.size();
        int i = 0;
        while (pool.size() < static_cast<size_t>(C)) {
            Entrant e = pool[i % base];
            if (config.mutation_enabled) {
                std::uniform_int_distribution<int> pick(0, static_cast<int>(N) - 1);
                int gi = pick(rng);
                e.genes[gi] = problem.mutate_site(e.genes[gi], rng);
            }
            e.order = static_cast<int>(pool.size());
            pool.push_back(std::move(e));
            ++i;
        }
        evaluate(pool);
        sort_pool(pool, threshold);
    }

    int generations = 0;
    for (;;) {
        if (satisfied(pool[0].score))
            return make_result(problem, pool, generations, kt, std::move(trace));
        if (generations >= config.max_generations) {
            StageTwoResult best = make_result(problem, pool, generations, kt, trace);
            throw Stage2NonConvergence(
                "stage 2 hit the generation limit (best coverage " +
                    std::to_string(best.coverage) + ", GDOP avg " + std::to_string(best.gdop_avg) +
                    ")",
                std::move(best));
        }

        std::vector<Entrant> offspring;
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(N) - 1);
        for (int i = 0; i + 1 < static_cast<int>(pool.size()); ++i) {
            Entrant child;
            child.genes = crossover(problem, pool[i].genes, pool[i + 1].genes, rng);
            if (config.mutation_enabled && uni(rng) < config.mutation_rate) {
                int gi = pick(rng);
                child.genes[gi] = problem.mutate_site(child.genes[gi], rng);
            }
            offspring.push_back(std::move(child));
        }
        {  // refill to C offspring with a mutated copy of the best
            Entrant extra = pool[0];
            if (config.mutation_enabled) {
                int gi = pick(rng);
                extra.genes[gi] = problem.mutate_site(extra.genes[gi], rng);
            }
            offspring.push_back(std::move(extra));
        }
        evaluate(offspring);

        for (auto& o : offspring) pool.push_back(std::move(o));
        for (size_t i = 0; i < pool.size(); ++i) pool[i].order = static_cast<int>(i);
        sort_pool(pool, threshold);
        pool.resize(C);
        ++generations;
        trace.push_back({generations, pool[0].score});
    }
}

}  // namespace beaconopt
