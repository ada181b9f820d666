#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "diwe/instance.hpp"

namespace diwe {

/// Radius sentinel for regions whose pool was too small to estimate one.
/// Stored as IEEE +inf so `dist² <= radius²` is exactly "always hit".
inline constexpr double kUnboundedRadius = std::numeric_limits<double>::infinity();

/// Smallest training size m for which the normal approximation behind the
/// region sample proportion is trusted: ceil(max{10/phi, 10/(1-phi)}).
/// Pools below this keep the unbounded radius.
std::size_t min_training_size(double phi);

/// Smallest tau with (1-phi)^tau < alpha — the number of consecutive misses
/// after which a region's zero-hit probability drops below the drift
/// significance level and the region is dropped.
int drift_horizon(double phi, double alpha);

/// (1-phi)^tau: the binomial CDF at zero hits over tau arrivals.
double zero_hit_probability(double phi, unsigned tau);

/// Distance from `core` to its k-th nearest neighbor in `pool`, with
/// k = ceil(phi * |pool|). A pool element whose arrival index equals the
/// core's is the core itself and is excluded from the ranking. Neighbor
/// order is (distance, arrival index), so ties are deterministic.
/// Throws DataError when fewer than k candidates exist; callers fall back
/// to the unbounded radius.
double region_radius(const LabeledInstance& core, std::span<const LabeledInstance> pool,
                     double phi);

/// Read-only view of one stored region.
struct RegionView {
    std::span<const double> features;
    int label;
    std::uint64_t arrival;
    double radius;    // kUnboundedRadius when not yet estimable
    double weight;    // (1-phi)^misses
    std::uint32_t misses;
};

/**
 * One phi-level region set: an insertion-ordered buffer of regions, each an
 * n-ball around a stored instance. Per arriving instance the set
 *   1. resets and re-estimates every region the instance lands in, and
 *      decays the weight of every region it misses,
 *   2. drops regions whose weight fell below the drift significance level,
 *   3. stores the instance as a new region, and
 *   4. evicts minimum-weight regions (oldest first on ties) while the
 *      buffer exceeds max_buffer.
 *
 * Radii are estimated against the stored cores (the only buffer the update
 * loop maintains): k = ceil(phi * pool size), and radii stay unbounded
 * while the pool is under min_training_size(phi).
 *
 * Weights are tracked two ways: the float `weight` decays multiplicatively,
 * and the integer `misses` counter drives all decisions exactly
 * (weight < alpha  <=>  misses >= drift_horizon(phi, alpha)).
 *
 * Single writer; concurrent reads only between observe() calls. Distinct
 * sets are independent.
 */
class RegionSet {
public:
    /// phi must lie in (0, 0.5].
    RegionSet(double phi, std::size_t max_buffer);

    /// Region-set initialization from a training pool: one region per
    /// instance. Radii stay unbounded when the pool is under
    /// min_training_size(phi). Does not apply the buffer cap; oversized
    /// training sets drain through observe()'s eviction.
    static RegionSet initialize(double phi, std::span<const LabeledInstance> training,
                                std::size_t max_buffer);

    /// Feeds one instance through steps 1-4 above.
    void observe(const LabeledInstance& inst, double alpha);

    double phi() const noexcept { return phi_; }
    std::size_t max_buffer() const noexcept { return max_buffer_; }
    std::size_t size() const noexcept { return arrivals_.size(); }
    bool empty() const noexcept { return arrivals_.empty(); }
    std::size_t dim() const noexcept { return dim_; }

    /// Arrival indices of stored cores, ascending (== insertion order).
    std::span<const std::uint64_t> arrivals() const noexcept { return arrivals_; }
    std::span<const int> labels() const noexcept { return labels_; }
    std::span<const std::uint32_t> misses() const noexcept { return misses_; }
    std::span<const double> weights() const noexcept { return weights_; }
    /// Flat row-major feature matrix, size() x dim().
    std::span<const double> feature_matrix() const noexcept { return feats_; }
    std::span<const double> features(std::size_t i) const {
        return {feats_.data() + i * dim_, dim_};
    }
    double radius(std::size_t i) const { return std::sqrt(radius_sq_[i]); }
    bool has_radius(std::size_t i) const { return radius_sq_[i] != kUnboundedRadius; }
    RegionView region(std::size_t i) const {
        return {features(i), labels_[i], arrivals_[i], radius(i), weights_[i], misses_[i]};
    }

    /// Stored cores as instances, in insertion order.
    std::vector<LabeledInstance> core_instances() const;

    /// Versioned little-endian binary snapshot; round-trips bit-exactly.
    void save(std::ostream& out) const;
    static RegionSet load(std::istream& in);

    /// Bitwise equality of the stored state (scratch/caches excluded).
    bool operator==(const RegionSet& other) const {
        return phi_ == other.phi_ && max_buffer_ == other.max_buffer_ && dim_ == other.dim_ &&
               feats_ == other.feats_ && arrivals_ == other.arrivals_ &&
               labels_ == other.labels_ && radius_sq_ == other.radius_sq_ &&
               weights_ == other.weights_ && misses_ == other.misses_;
    }

private:
    friend class RegionSetTestAccess;

    void ensure_dim(const LabeledInstance& inst);
    void append_region(const LabeledInstance& inst, double radius_sq);
    void erase_region(std::size_t i);
    int horizon_for(double alpha);
    /// k-th smallest squared distance from core i to the other stored cores.
    /// `pivot_hint` (the region's previous radius) usually splits off all
    /// but ~k elements in one pass; the selected value is pivot-invariant.
    double rebuilt_radius_sq(std::size_t i, double pivot_hint) const;
    /// k-th smallest of vals[0..count) (1-based k), partition-accelerated.
    double select_kth(std::vector<double>& vals, std::size_t k, double pivot_hint) const;

    double phi_ = 0.0;
    std::size_t max_buffer_ = 0;
    std::size_t dim_ = 0;

    // SoA storage, index-aligned, insertion order.
    std::vector<double> feats_;
    std::vector<std::uint64_t> arrivals_;
    std::vector<int> labels_;
    std::vector<double> radius_sq_;
    std::vector<double> weights_;
    std::vector<std::uint32_t> misses_;

    // cached drift horizon for the last alpha seen
    double cached_alpha_ = -1.0;
    int cached_horizon_ = 0;

    // scratch + pivot hints (excluded from comparison/serialization; they
    // never influence observable state)
    mutable std::vector<double> scratch_;
    mutable std::vector<double> scratch2_;
    double last_new_radius_sq_ = kUnboundedRadius;
};

}  // namespace diwe
