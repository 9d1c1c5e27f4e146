#include "beaconopt/coverage.hpp"

#include <bit>
#include <stdexcept>

#include "beaconopt/errors.hpp"
#include "beaconopt/parallel.hpp"

namespace beaconopt {

int Bitset::count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
}

int ConnectivityMatrix::column_sum(int j) const {
    int c = 0;
    for (const auto& r : rows)
        if (r.test(j)) ++c;
    return c;
}

ConnectivityMatrix build_connectivity(const BeaconDomain& domain_b, const DroneDomain& domain_d,
                                      const SensorModel& model, const FloorPlan& plan) {
    if (domain_b.sites.empty() || domain_d.points.empty())
        throw ValidationError("connectivity needs non-empty domains");
    ConnectivityMatrix bc;
    bc.n_points = static_cast<int>(domain_d.points.size());
    bc.rows.assign(domain_b.sites.size(), Bitset(bc.n_points));
    parallel_for(static_cast<int>(domain_b.sites.size()), [&](int i) {
        const BeaconSite& site = domain_b.sites[i];
        Bitset& row = bc.rows[i];
        for (int j = 0; j < bc.n_points; ++j)
            if (beacon_covers(model, site, domain_d.points[j], plan)) row.set(j);
    });
    return bc;
}

namespace {

// Saturating per-point counters as k bit planes: levels[l] set where a
// point has been covered by more than l rows.
std::vector<Bitset> count_planes(std::span<const Bitset* const> rows, int k, int n_points) {
    std::vector<Bitset> levels(k, Bitset(n_points));
    const int n_words = static_cast<int>(levels[0].words().size());
    for (const Bitset* row : rows) {
        const auto& rw = row->words();
        for (int w = 0; w < n_words; ++w) {
            std::uint64_t carry = rw[w];
            for (int l = 0; l < k && carry; ++l) {
                auto& lvl = levels[l].words()[w];
                const std::uint64_t next = lvl & carry;
                lvl |= carry;
                carry = next;
            }
        }
    }
    return levels;
}

}  // namespace

int count_covered_at_least(std::span<const Bitset* const> rows, int k, int n_points) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (rows.empty()) return 0;
    auto levels = count_planes(rows, k, n_points);
    return levels[k - 1].count();
}

std::vector<double> coverage_fractions(std::span<const Bitset* const> rows, int k_max,
                                       int n_points) {
    std::vector<double> out(k_max, 0.0);
    if (n_points == 0) return out;
    if (!rows.empty()) {
        auto levels = count_planes(rows, k_max, n_points);
        for (int l = 0; l < k_max; ++l)
            out[l] = static_cast<double>(levels[l].count()) / n_points;
    }
    return out;
}

double k_coverage_fraction(const ConnectivityMatrix& bc, std::span<const int> selection, int k) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (bc.n_points == 0) return 0.0;
    std::vector<const Bitset*> rows;
    rows.reserve(selection.size());
    for (int i : selection) rows.push_back(&bc.rows.at(i));
    return static_cast<double>(count_covered_at_least(rows, k, bc.n_points)) / bc.n_points;
}

double total_coverage(const ConnectivityMatrix& bc, std::span<const int> selection) {
    return k_coverage_fraction(bc, selection, 1);
}

}  // namespace beaconopt
