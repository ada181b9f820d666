#pragma once

#include <span>
#include <vector>

#include "diwe/region_set.hpp"

namespace diwe {

/// The region sets of one ensemble, ordered by ascending phi. All members
/// share max_buffer and are fed the identical instance sequence.
struct RegionSetFamily {
    std::vector<RegionSet> members;

    std::size_t size() const noexcept { return members.size(); }
};

/// A chosen voting subset: ascending member indices plus the average RDD of
/// the subset (0 by convention for a singleton).
struct EnsembleSelection {
    std::vector<int> indices;
    double diversity = 0.0;

    bool operator==(const EnsembleSelection&) const = default;
};

/// Region drift disagreement: 1 - Jaccard similarity of the two sets' stored
/// core instances, identity keyed by arrival index. Two empty sets agree
/// perfectly (0).
double rdd(const RegionSet& a, const RegionSet& b);

/// Mean RDD over all unordered pairs: 2/(K(K-1)) * sum of pairwise RDD.
/// Pairs are accumulated grouped by the later member with the earlier member
/// ascending ((0,1), (0,2), (1,2), (0,3), ...); that order is part of the
/// contract so independent reimplementations can match bit-for-bit.
/// Throws std::invalid_argument for fewer than two sets.
double average_diversity(std::span<const RegionSet> subset);

/// Flattened strict upper triangle of the pairwise RDD matrix,
/// entry index (i,j), i<j, at position i*n - i*(i+1)/2 + (j-i-1).
std::vector<double> pairwise_rdd(const RegionSetFamily& family);

/**
 * Max-RDD ensembler selection: enumerates every size-voting_size combination
 * of family members in lexicographic order over the precomputed pairwise RDD
 * values and keeps the first combination attaining the maximal average
 * diversity. Combinations are compared on raw pair sums; the winner's sum is
 * normalized once, so the reported diversity equals average_diversity of the
 * selected subset.
 *
 * voting_size may be 1 (every singleton scores 0; the first one wins).
 */
EnsembleSelection max_rdd_select(const RegionSetFamily& family, int voting_size);

/// Same selection over an externally supplied pair matrix (upper triangle,
/// pairwise_rdd layout) for n members.
EnsembleSelection max_rdd_select_from_pairs(std::span<const double> pairs, int n,
                                            int voting_size);

}  // namespace diwe
