#pragma once

#include <cstddef>

#include "diwe/instance.hpp"

namespace diwe::detail {

template <std::size_t Dim>
void row_sq_fixed(const double* q, const double* feats, std::size_t count, double* out) {
    for (std::size_t j = 0; j < count; ++j) {
        const double* p = feats + j * Dim;
        double acc = 0.0;
        for (std::size_t d = 0; d < Dim; ++d) {
            const double diff = q[d] - p[d];
            acc += diff * diff;
        }
        out[j] = acc;
    }
}

/// Squared distances from q to every row of a flat feature matrix. The
/// fixed-dimension paths keep the inner loop unrollable.
inline void row_sq_distances(const double* q, const double* feats, std::size_t count,
                             std::size_t dim, double* out) {
    switch (dim) {
        case 1: row_sq_fixed<1>(q, feats, count, out); return;
        case 2: row_sq_fixed<2>(q, feats, count, out); return;
        case 3: row_sq_fixed<3>(q, feats, count, out); return;
        case 8: row_sq_fixed<8>(q, feats, count, out); return;
        case 10: row_sq_fixed<10>(q, feats, count, out); return;
        default:
            for (std::size_t j = 0; j < count; ++j)
                out[j] = squared_distance({q, dim}, {feats + j * dim, dim});
    }
}

}  // namespace diwe::detail
