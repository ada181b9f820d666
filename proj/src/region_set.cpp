#include "diwe/region_set.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "diwe/detail/kernels.hpp"

namespace diwe {

using detail::row_sq_distances;

namespace {

// Absorbs binary representation error in products like 0.075 * 40, whose
// exact value is an integer the double grid cannot quite hit.
constexpr double kCeilGuard = 1e-9;

std::size_t ceil_guarded(double x) {
    return static_cast<std::size_t>(std::ceil(x - kCeilGuard));
}

void check_phi_open_unit(double phi, const char* who) {
    if (!(phi > 0.0) || !(phi < 1.0))
        throw std::invalid_argument(std::string(who) + ": phi must lie in (0,1), got " +
                                    std::to_string(phi));
}

}  // namespace

std::size_t min_training_size(double phi) {
    check_phi_open_unit(phi, "min_training_size");
    return ceil_guarded(std::max(10.0 / phi, 10.0 / (1.0 - phi)));
}

int drift_horizon(double phi, double alpha) {
    check_phi_open_unit(phi, "drift_horizon");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("drift_horizon: alpha must lie in (0,1)");
    // Start from the closed form and settle the strict inequality with pow
    // so exact-integer logs (e.g. phi=0.5, alpha=0.25) land correctly.
    const double base = 1.0 - phi;
    int tau = static_cast<int>(std::floor(std::log(alpha) / std::log(base)));
    if (tau < 0) tau = 0;
    while (tau > 0 && std::pow(base, tau) < alpha) --tau;
    while (std::pow(base, tau) >= alpha) ++tau;
    return tau;
}

double zero_hit_probability(double phi, unsigned tau) {
    check_phi_open_unit(phi, "zero_hit_probability");
    return std::pow(1.0 - phi, static_cast<double>(tau));
}

double region_radius(const LabeledInstance& core, std::span<const LabeledInstance> pool,
                     double phi) {
    check_phi_open_unit(phi, "region_radius");
    if (pool.empty()) throw DataError("region_radius: empty pool");
    const std::size_t k = std::max<std::size_t>(1, ceil_guarded(phi * static_cast<double>(pool.size())));
    std::vector<double> dist_sq;
    dist_sq.reserve(pool.size());
    for (const LabeledInstance& p : pool) {
        if (p.t == core.t) continue;  // never rank the core against itself
        if (p.features.size() != core.features.size())
            throw std::invalid_argument("region_radius: dimension mismatch in pool");
        dist_sq.push_back(squared_distance(core.features, p.features));
    }
    if (k > dist_sq.size())
        throw DataError("region_radius: k=" + std::to_string(k) + " exceeds " +
                        std::to_string(dist_sq.size()) + " candidates");
    std::nth_element(dist_sq.begin(), dist_sq.begin() + (k - 1), dist_sq.end());
    return std::sqrt(dist_sq[k - 1]);
}

RegionSet::RegionSet(double phi, std::size_t max_buffer) : phi_(phi), max_buffer_(max_buffer) {
    if (!(phi > 0.0) || !(phi <= 0.5))
        throw std::invalid_argument("RegionSet: phi must lie in (0, 0.5], got " +
                                    std::to_string(phi));
    if (max_buffer < 1) throw std::invalid_argument("RegionSet: max_buffer must be >= 1");
}

RegionSet RegionSet::initialize(double phi, std::span<const LabeledInstance> training,
                                std::size_t max_buffer) {
    RegionSet rs(phi, max_buffer);
    const std::size_t m0 = training.size();
    if (m0 == 0) return rs;

    rs.ensure_dim(training.front());
    const bool estimable = m0 >= min_training_size(phi);
    for (const LabeledInstance& inst : training) rs.append_region(inst, kUnboundedRadius);

    if (estimable) {
        const std::size_t k = std::max<std::size_t>(1, ceil_guarded(phi * static_cast<double>(m0)));
        rs.scratch_.resize(m0);
        for (std::size_t i = 0; i < m0; ++i) {
            row_sq_distances(rs.feats_.data() + i * rs.dim_, rs.feats_.data(), m0, rs.dim_,
                             rs.scratch_.data());
            rs.scratch_[i] = kUnboundedRadius;
            std::nth_element(rs.scratch_.begin(), rs.scratch_.begin() + (k - 1), rs.scratch_.end());
            rs.radius_sq_[i] = rs.scratch_[k - 1];
        }
    }
    return rs;
}

void RegionSet::ensure_dim(const LabeledInstance& inst) {
    if (dim_ == 0) {
        if (inst.features.empty()) throw std::invalid_argument("RegionSet: empty feature vector");
        dim_ = inst.features.size();
    } else if (inst.features.size() != dim_) {
        throw std::invalid_argument("RegionSet: instance dimension " +
                                    std::to_string(inst.features.size()) + " != " +
                                    std::to_string(dim_));
    }
}

void RegionSet::append_region(const LabeledInstance& inst, double radius_sq) {
    feats_.insert(feats_.end(), inst.features.begin(), inst.features.end());
    arrivals_.push_back(inst.t);
    labels_.push_back(inst.label);
    radius_sq_.push_back(radius_sq);
    weights_.push_back(1.0);
    misses_.push_back(0);
}

void RegionSet::erase_region(std::size_t i) {
    feats_.erase(feats_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                 feats_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
    arrivals_.erase(arrivals_.begin() + static_cast<std::ptrdiff_t>(i));
    labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(i));
    radius_sq_.erase(radius_sq_.begin() + static_cast<std::ptrdiff_t>(i));
    weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(i));
    misses_.erase(misses_.begin() + static_cast<std::ptrdiff_t>(i));
}

int RegionSet::horizon_for(double alpha) {
    if (alpha != cached_alpha_) {
        cached_horizon_ = drift_horizon(phi_, alpha);
        cached_alpha_ = alpha;
    }
    return cached_horizon_;
}

double RegionSet::select_kth(std::vector<double>& vals, std::size_t k, double pivot_hint) const {
    const std::size_t k0 = k - 1;
    if (std::isfinite(pivot_hint) && pivot_hint > 0.0) {
        // One branchless pass splits vals around the hint; the wanted order
        // statistic then lives in a slice of expected size ~k.
        const std::size_t count = vals.size();
        scratch2_.resize(count);
        std::size_t below = 0, above = 0;
        for (std::size_t j = 0; j < count; ++j) {
            const double v = vals[j];
            vals[below] = v;
            below += v < pivot_hint ? 1 : 0;
            scratch2_[above] = v;
            above += v < pivot_hint ? 0 : 1;
        }
        if (k0 < below) {
            std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k0),
                             vals.begin() + static_cast<std::ptrdiff_t>(below));
            return vals[k0];
        }
        std::nth_element(scratch2_.begin(), scratch2_.begin() + static_cast<std::ptrdiff_t>(k0 - below),
                         scratch2_.begin() + static_cast<std::ptrdiff_t>(above));
        return scratch2_[k0 - below];
    }
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k0), vals.end());
    return vals[k0];
}

double RegionSet::rebuilt_radius_sq(std::size_t i, double pivot_hint) const {
    const std::size_t count = arrivals_.size();
    const std::size_t k = std::max<std::size_t>(1, ceil_guarded(phi_ * static_cast<double>(count)));
    if (count < min_training_size(phi_) || k > count - 1) return kUnboundedRadius;
    scratch_.resize(count);
    row_sq_distances(feats_.data() + i * dim_, feats_.data(), count, dim_, scratch_.data());
    scratch_[i] = kUnboundedRadius;  // the core itself ranks last, never k-th
    return select_kth(scratch_, k, pivot_hint);
}

void RegionSet::observe(const LabeledInstance& inst, double alpha) {
    ensure_dim(inst);
    const std::size_t entry_count = arrivals_.size();
    const int horizon = horizon_for(alpha);
    const std::size_t min_train = min_training_size(phi_);
    const double decay = 1.0 - phi_;

    // Distances from the new instance to every entry core. Reused for the
    // hit tests and, after compaction, as the new region's neighbor pool.
    std::vector<double> inst_dist(entry_count);
    row_sq_distances(inst.features.data(), feats_.data(), entry_count, dim_, inst_dist.data());

    // 1. hit -> reset & re-estimate; miss -> decay
    for (std::size_t j = 0; j < entry_count; ++j) {
        if (inst_dist[j] <= radius_sq_[j]) {
            misses_[j] = 0;
            weights_[j] = 1.0;
            radius_sq_[j] = rebuilt_radius_sq(j, radius_sq_[j]);
        } else {
            ++misses_[j];
            weights_[j] *= decay;
        }
    }

    // 2. drop drifted regions (misses >= horizon <=> weight < alpha)
    std::size_t out = 0;
    for (std::size_t j = 0; j < entry_count; ++j) {
        if (misses_[j] >= static_cast<std::uint32_t>(horizon)) continue;
        if (out != j) {
            std::memmove(feats_.data() + out * dim_, feats_.data() + j * dim_,
                         dim_ * sizeof(double));
            arrivals_[out] = arrivals_[j];
            labels_[out] = labels_[j];
            radius_sq_[out] = radius_sq_[j];
            weights_[out] = weights_[j];
            misses_[out] = misses_[j];
            inst_dist[out] = inst_dist[j];
        }
        ++out;
    }
    if (out != entry_count) {
        feats_.resize(out * dim_);
        arrivals_.resize(out);
        labels_.resize(out);
        radius_sq_.resize(out);
        weights_.resize(out);
        misses_.resize(out);
        inst_dist.resize(out);
    }

    // 3. the instance becomes a region of its own
    double new_radius_sq = kUnboundedRadius;
    const std::size_t pool = inst_dist.size();
    if (pool >= min_train) {
        const std::size_t k = std::max<std::size_t>(1, ceil_guarded(phi_ * static_cast<double>(pool)));
        if (k <= pool) new_radius_sq = select_kth(inst_dist, k, last_new_radius_sq_);
    }
    last_new_radius_sq_ = new_radius_sq;
    append_region(inst, new_radius_sq);

    // 4. buffer cap: evict minimum weight, oldest on ties
    while (arrivals_.size() > max_buffer_) {
        std::size_t victim = 0;
        for (std::size_t j = 1; j < arrivals_.size(); ++j)
            if (misses_[j] > misses_[victim]) victim = j;  // first max == oldest on ties
        erase_region(victim);
    }

#ifndef NDEBUG
    for (std::size_t j = 0; j < arrivals_.size(); ++j) {
        const double exact = std::pow(decay, static_cast<double>(misses_[j]));
        assert(std::abs(weights_[j] - exact) <= 1e-9 * exact + 1e-300);
        assert(weights_[j] >= alpha * (1.0 - 1e-9));
    }
#endif
}

std::vector<LabeledInstance> RegionSet::core_instances() const {
    std::vector<LabeledInstance> cores;
    cores.reserve(arrivals_.size());
    for (std::size_t i = 0; i < arrivals_.size(); ++i) {
        auto f = features(i);
        cores.push_back({{f.begin(), f.end()}, labels_[i], arrivals_[i]});
    }
    return cores;
}


namespace {

constexpr std::uint32_t kSnapshotMagic = 0x44695253;  // "DiRS"
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("region set snapshot: truncated input");
    return v;
}

}  // namespace

void RegionSet::save(std::ostream& out) const {
    put(out, kSnapshotMagic);
    put(out, kSnapshotVersion);
    put(out, phi_);
    put(out, static_cast<std::uint64_t>(max_buffer_));
    put(out, static_cast<std::uint64_t>(dim_));
    put(out, static_cast<std::uint64_t>(arrivals_.size()));
    for (std::size_t i = 0; i < arrivals_.size(); ++i) {
        put(out, arrivals_[i]);
        put(out, static_cast<std::int32_t>(labels_[i]));
        put(out, misses_[i]);
        put(out, weights_[i]);
        put(out, radius_sq_[i]);
        out.write(reinterpret_cast<const char*>(feats_.data() + i * dim_),
                  static_cast<std::streamsize>(dim_ * sizeof(double)));
    }
    if (!out) throw DataError("region set snapshot: write failed");
}

RegionSet RegionSet::load(std::istream& in) {
    if (get<std::uint32_t>(in) != kSnapshotMagic)
        throw DataError("region set snapshot: bad magic");
    if (get<std::uint32_t>(in) != kSnapshotVersion)
        throw DataError("region set snapshot: unsupported version");
    const double phi = get<double>(in);
    const auto max_buffer = static_cast<std::size_t>(get<std::uint64_t>(in));
    const auto dim = static_cast<std::size_t>(get<std::uint64_t>(in));
    const auto count = static_cast<std::size_t>(get<std::uint64_t>(in));

    RegionSet rs(phi, max_buffer);
    rs.dim_ = dim;
    rs.feats_.resize(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        rs.arrivals_.push_back(get<std::uint64_t>(in));
        rs.labels_.push_back(get<std::int32_t>(in));
        rs.misses_.push_back(get<std::uint32_t>(in));
        rs.weights_.push_back(get<double>(in));
        rs.radius_sq_.push_back(get<double>(in));
        in.read(reinterpret_cast<char*>(rs.feats_.data() + i * dim),
                static_cast<std::streamsize>(dim * sizeof(double)));
        if (!in) throw DataError("region set snapshot: truncated features");
    }
    return rs;
}

}  // namespace diwe
