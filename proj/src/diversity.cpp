#include "diwe/diversity.hpp"

#include <stdexcept>
#include <string>

namespace diwe {

double rdd(const RegionSet& a, const RegionSet& b) {
    const auto ids_a = a.arrivals();
    const auto ids_b = b.arrivals();
    if (ids_a.empty() && ids_b.empty()) return 0.0;

    // Both arrival lists are ascending; two-pointer intersection count.
    std::size_t i = 0, j = 0, both = 0;
    while (i < ids_a.size() && j < ids_b.size()) {
        if (ids_a[i] == ids_b[j]) {
            ++both;
            ++i;
            ++j;
        } else if (ids_a[i] < ids_b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t either = ids_a.size() + ids_b.size() - both;
    return 1.0 - static_cast<double>(both) / static_cast<double>(either);
}

double average_diversity(std::span<const RegionSet> subset) {
    const std::size_t k = subset.size();
    if (k < 2)
        throw std::invalid_argument("average_diversity: need at least 2 region sets, got " +
                                    std::to_string(k));
    double sum = 0.0;
    for (std::size_t later = 1; later < k; ++later)
        for (std::size_t earlier = 0; earlier < later; ++earlier)
            sum += rdd(subset[earlier], subset[later]);
    return (2.0 * sum) / static_cast<double>(k * (k - 1));
}

std::vector<double> pairwise_rdd(const RegionSetFamily& family) {
    const std::size_t n = family.size();
    std::vector<double> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairs.push_back(rdd(family.members[i], family.members[j]));
    return pairs;
}

EnsembleSelection max_rdd_select_from_pairs(std::span<const double> pairs, int n,
                                            int voting_size) {
    if (voting_size < 1 || voting_size > n)
        throw std::invalid_argument("max_rdd_select: voting_size " + std::to_string(voting_size) +
                                    " out of range [1," + std::to_string(n) + "]");
    const int r = voting_size;

    // Full matrix for O(1) lookups; fits L1 for any realistic grid.
    std::vector<double> table(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j, ++idx) {
                table[static_cast<std::size_t>(i) * n + j] = pairs[idx];
                table[static_cast<std::size_t>(j) * n + i] = pairs[idx];
            }
    }

    // Lexicographic scan with prefix pair sums: psum[d] is the pair sum of
    // members[0..d). Resuming from the first changed position keeps the
    // amortized cost per combination at O(r). Pairs join the sum grouped by
    // the later member (earlier members ascending) — the same order
    // average_diversity uses, so sums match it bit-for-bit.
    std::vector<int> members(static_cast<std::size_t>(r));
    std::vector<double> psum(static_cast<std::size_t>(r) + 1, 0.0);
    for (int d = 0; d < r; ++d) members[static_cast<std::size_t>(d)] = d;
    auto extend_sums = [&](int from) {
        for (int d = from; d < r; ++d) {
            const double* row = table.data() + static_cast<std::size_t>(members[static_cast<std::size_t>(d)]) * n;
            double s = psum[static_cast<std::size_t>(d)];
            for (int q = 0; q < d; ++q) s += row[members[static_cast<std::size_t>(q)]];
            psum[static_cast<std::size_t>(d) + 1] = s;
        }
    };
    extend_sums(0);

    std::vector<int> best = members;  // the first combination seeds the max
    double best_sum = psum[static_cast<std::size_t>(r)];
    for (;;) {
        int p = r - 1;
        while (p >= 0 && members[static_cast<std::size_t>(p)] == n - r + p) --p;
        if (p < 0) break;
        ++members[static_cast<std::size_t>(p)];
        for (int q = p + 1; q < r; ++q)
            members[static_cast<std::size_t>(q)] = members[static_cast<std::size_t>(q) - 1] + 1;
        extend_sums(p);
        if (psum[static_cast<std::size_t>(r)] > best_sum) {
            best_sum = psum[static_cast<std::size_t>(r)];
            best = members;
        }
    }

    EnsembleSelection sel;
    sel.indices = std::move(best);
    sel.diversity =
        r < 2 ? 0.0 : (2.0 * best_sum) / static_cast<double>(r * (r - 1));
    return sel;
}

EnsembleSelection max_rdd_select(const RegionSetFamily& family, int voting_size) {
    const auto pairs = pairwise_rdd(family);
    return max_rdd_select_from_pairs(pairs, static_cast<int>(family.size()), voting_size);
}

}  // namespace diwe
