#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "beaconopt/coverage.hpp"
#include "beaconopt/geometry.hpp"
#include "beaconopt/rng.hpp"

namespace beaconopt {

/// Evolutionary solver configuration. survivor_count_s must divide
/// population_size_p evenly (each parent spawns P/S offspring).
struct EaConfig {
    int population_size_p = 250;
    int survivor_count_s = 5;
    int k_target = 4;
    double coverage_threshold = 1.0;   // (0,1]
    double gdop_threshold_g = 20.0;    // stage-2 stop bound
    std::uint64_t rng_seed = 1;
    int max_generations = 500;         // per k stage / stage 2
    bool mutation_enabled = true;      // stage-2 positional mutation
    double mutation_rate = 0.1;
    bool prune_enabled = true;         // stage-1 redundancy elimination

    void validate() const;
};

/// One beacon gene: a mount site, tagged with its grid index when it came
/// from the discrete candidate set (-1 for free positions).
struct SiteGene {
    BeaconSite site;
    int grid_index = -1;
};

/// What the evolutionary stages need from a problem instance. Coverage
/// rows returned by coverage_row stay valid for the problem's lifetime and
/// calls are thread-safe.
class SolverProblem {
public:
    virtual ~SolverProblem() = default;

    virtual int point_count() const = 0;
    /// Number of round-robin sampling slots (5 surfaces for rooms).
    virtual int surface_count() const = 0;
    virtual SiteGene sample_site(int surface_slot, Rng& rng) const = 0;
    /// Stratified variant: position drawn from cell `stratum` of an
    /// n_strata partition of the surface, so one generation's proposals
    /// spread evenly over it. Defaults to plain sampling.
    virtual SiteGene sample_site_stratified(int surface_slot, int stratum, int n_strata,
                                            Rng& rng) const {
        (void)stratum;
        (void)n_strata;
        return sample_site(surface_slot, rng);
    }
    virtual const Bitset& coverage_row(const SiteGene& gene) const = 0;
    /// Fraction of the gene's coverage footprint falling outside the
    /// flight region (0 when the notion does not apply).
    virtual double waste_fraction(const SiteGene& gene) const = 0;
    virtual bool supports_gdop() const = 0;
    /// Mean GDOP over points covered by >= 4 of the genes (capped values
    /// included); kGdopCap when nothing is 4-covered.
    virtual double covered_gdop_avg(std::span<const SiteGene> genes) const = 0;
    /// In-surface Gaussian displacement, clamped to the legal region.
    virtual SiteGene mutate_site(const SiteGene& gene, Rng& rng) const = 0;
    virtual bool genes_coincide(const SiteGene& a, const SiteGene& b) const = 0;
    /// Throws InfeasibleError if some point is covered by no candidate site.
    virtual void check_feasible() const = 0;
    /// Discrete candidate grid backing the problem (for exchange moves).
    virtual const ConnectivityMatrix& candidate_grid() const = 0;
    virtual SiteGene gene_from_grid(int index) const = 0;
};

/// Mean GDOP over the points covered by >= 4 rows; positions[i] is the
/// beacon position behind rows[i]. Returns kGdopCap when no point is
/// 4-covered. Accumulates in point-index order.
double covered_gdop_average(std::span<const Bitset* const> rows, std::span<const Vec3> positions,
                            std::span<const Vec3> points);

/// Geometry-backed instance: discretized domains, precomputed grid
/// connectivity, and an on-demand cache of coverage rows for free
/// (off-grid) beacon positions, keyed by 1 mm quantization.
class PlacementProblem : public SolverProblem {
public:
    PlacementProblem(FloorPlan plan, SensorModel model, double drone_res_m, double beacon_res_m);
    explicit PlacementProblem(const Scenario& sc)
        : PlacementProblem(sc.plan, sc.sensor, sc.drone_resolution_m, sc.beacon_resolution_m) {}

    const FloorPlan& plan() const { return plan_; }
    const SensorModel& model() const { return model_; }
    const DroneDomain& drone_domain() const { return drone_; }
    const BeaconDomain& beacon_domain() const { return beacon_; }
    const ConnectivityMatrix& connectivity() const { return bc_; }
    double beacon_resolution() const { return beacon_res_; }

    int point_count() const override { return static_cast<int>(drone_.points.size()); }
    int surface_count() const override { return 5; }
    SiteGene sample_site(int surface_slot, Rng& rng) const override;
    SiteGene sample_site_stratified(int surface_slot, int stratum, int n_strata,
                                    Rng& rng) const override;
    const Bitset& coverage_row(const SiteGene& gene) const override;
    double waste_fraction(const SiteGene& gene) const override;
    bool supports_gdop() const override { return true; }
    double covered_gdop_avg(std::span<const SiteGene> genes) const override;
    SiteGene mutate_site(const SiteGene& gene, Rng& rng) const override;
    bool genes_coincide(const SiteGene& a, const SiteGene& b) const override;
    void check_feasible() const override;
    const ConnectivityMatrix& candidate_grid() const override { return bc_; }
    SiteGene gene_from_grid(int index) const override {
        return SiteGene{beacon_.sites.at(index), index};
    }

    /// True when the site lies on the ceiling or a top-half wall (1e-9
    /// tolerance), has the matching inward normal, and is not inside an
    /// obstacle. `why` receives the violated invariant name on failure.
    bool site_in_beacon_region(const BeaconSite& site, std::string* why = nullptr) const;

private:
    struct Surface {
        Vec3 origin, du, dv;  // position = origin + u*du + v*dv, u,v in [0,1]
        Vec3 normal;
    };
    struct CacheEntry {
        Bitset row;
        double waste = 0.0;
    };

    const CacheEntry& entry_for(const SiteGene& gene) const;
    CacheEntry compute_entry(const BeaconSite& site) const;

    FloorPlan plan_;
    SensorModel model_;
    double beacon_res_;
    DroneDomain drone_;
    BeaconDomain beacon_;
    ConnectivityMatrix bc_;
    std::vector<double> grid_waste_;  // aligned with beacon_.sites
    std::vector<Surface> surfaces_;
    std::vector<Vec3> waste_dirs_;    // canonical cone sample directions (mount-local)
    std::vector<double> waste_radii_;

    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::uint64_t, std::unique_ptr<CacheEntry>> cache_;
};

/// Synthetic instance over a raw connectivity matrix (used by the oracle
/// comparisons); genes are grid site indices, no geometry attached.
class MatrixProblem : public SolverProblem {
public:
    explicit MatrixProblem(ConnectivityMatrix bc);

    const ConnectivityMatrix& connectivity() const { return bc_; }

    int point_count() const override { return bc_.n_points; }
    int surface_count() const override { return 1; }
    SiteGene sample_site(int surface_slot, Rng& rng) const override;
    const Bitset& coverage_row(const SiteGene& gene) const override;
    double waste_fraction(const SiteGene&) const override { return 0.0; }
    bool supports_gdop() const override { return false; }
    double covered_gdop_avg(std::span<const SiteGene>) const override { return 0.0; }
    SiteGene mutate_site(const SiteGene& gene, Rng& rng) const override;
    bool genes_coincide(const SiteGene& a, const SiteGene& b) const override;
    void check_feasible() const override;
    const ConnectivityMatrix& candidate_grid() const override { return bc_; }
    SiteGene gene_from_grid(int index) const override {
        SiteGene g;
        g.grid_index = index;
        return g;
    }

private:
    ConnectivityMatrix bc_;
};

}  // namespace beaconopt
