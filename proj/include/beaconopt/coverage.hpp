#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beaconopt/geometry.hpp"

namespace beaconopt {

/// Fixed-size bit vector over drone-domain points.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int n_bits) : n_(n_bits), words_((n_bits + 63) / 64, 0) {}

    int size() const { return n_; }
    void set(int i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    int count() const;
    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

private:
    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense |B| x |D| boolean matrix: rows_[i].test(j) iff site i covers
/// point j. Row order follows BeaconDomain::sites, column order
/// DroneDomain::points. Immutable after build.
struct ConnectivityMatrix {
    std::vector<Bitset> rows;
    int n_points = 0;

    int n_sites() const { return static_cast<int>(rows.size()); }
    /// Covering-site count for point j across all rows.
    int column_sum(int j) const;
};

/// A selected set of beacon mounts (the decision variable). Sites must lie
/// in the beacon domain region and be pairwise distinct (1 mm tolerance).
struct BeaconPlacement {
    std::vector<BeaconSite> selected_sites;
};

/// Build the connectivity matrix; parallelizes over sites.
ConnectivityMatrix build_connectivity(const BeaconDomain& domain_b, const DroneDomain& domain_d,
                                      const SensorModel& model, const FloorPlan& plan);

/// Count of points covered by at least k rows, over arbitrary row sets.
int count_covered_at_least(std::span<const Bitset* const> rows, int k, int n_points);

/// Fractions covered by >= 1..k_max rows in a single pass.
std::vector<double> coverage_fractions(std::span<const Bitset* const> rows, int k_max,
                                       int n_points);

/// Fraction of domain points with at least k covering sites among the
/// selection. k >= 1; empty selection gives 0.
double k_coverage_fraction(const ConnectivityMatrix& bc, std::span<const int> selection, int k);

/// Fraction covered by at least one selected site (k = 1).
double total_coverage(const ConnectivityMatrix& bc, std::span<const int> selection);

}  // namespace beaconopt
