#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "diwe/instance.hpp"
#include "diwe/rng.hpp"

namespace diwe {

enum class GeneratorKind {
    oned_drift,
    sea_sudden,
    sea_gradual,
    hyperplane,
    rbf,
    rbf_regional,
};

GeneratorKind generator_kind_from_name(const std::string& name);
std::string generator_kind_name(GeneratorKind kind);

/// Parameters of one synthetic stream. Defaults reproduce the benchmark
/// setups: 10k instances, 10% label noise for SEA/hyperplane, drift speed
/// 0.001 for hyperplane/RBF, 50 RBF centroids with 10 drifting in the
/// regional variant. oned_drift is 4000 instances with a fixed schedule.
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::sea_sudden;
    std::uint64_t seed = 1;
    std::size_t length = 0;     // 0 -> kind default (4000 for oned, 10000 otherwise)
    double noise = -1.0;        // <0 -> kind default (0.10 SEA/hyperplane, 0 RBF/oned)
    double drift_per_step = 0.001;  // hyperplane weight drift / RBF centroid speed
    std::size_t rbf_centroids = 50;
    std::size_t rbf_drifting = 10;  // used by rbf_regional; plain rbf moves all

    std::size_t effective_length() const {
        if (length > 0) return length;
        return kind == GeneratorKind::oned_drift ? 4000 : 10000;
    }
    double effective_noise() const {
        if (noise >= 0.0) return noise;
        switch (kind) {
            case GeneratorKind::sea_sudden:
            case GeneratorKind::sea_gradual:
            case GeneratorKind::hyperplane:
                return 0.10;
            default:
                return 0.0;
        }
    }
};

/// Materializes the stream described by `spec`. Same spec, same bytes.
Stream generate(const GeneratorSpec& spec);

/**
 * 1-D two-component mixture with one incremental and one sudden drift:
 *   t in [   1,1250]  N(0,1)        | N(2,0.5)
 *   t in [1251,1750]  N(0,s(t))     | N(m(t),0.5)   s(t)=1+0.002(t-1250),
 *                                                   m(t)=2+0.002(t-1250)
 *   t in [1751,2500]  N(0,2)        | N(3,0.5)
 *   t in [2501,4000]  N(0,2)        | N(5,0.5)
 * Components are picked with equal probability; N(m,s) is mean/stddev.
 * Labels are fixed to class 0 (the stream exercises region upkeep, not
 * classification).
 */
class OnedDriftGenerator {
public:
    explicit OnedDriftGenerator(std::uint64_t seed) : rng_(seed) {}

    struct Draw {
        double value;
        int component;  // 0 or 1, exposed for distribution checks
    };
    /// t is 1-based.
    Draw sample(std::uint64_t t);

    static void segment_params(std::uint64_t t, int component, double& mean, double& stddev);

private:
    Rng rng_;
};

/// SEA: x1,x2,x3 ~ U[0,10], class 1 iff x1+x2 <= theta, theta = 8/9/7/9.5
/// over four equal concepts, label flipped with the noise probability. The
/// gradual variant alternates concepts 1 and 2 in 50-instance blocks over
/// the middle of the first transition (t in [2250,2750) at length 10000,
/// scaled proportionally otherwise).
class SeaGenerator {
public:
    SeaGenerator(std::uint64_t seed, bool gradual, std::size_t length, double noise);

    LabeledInstance next();
    std::uint64_t flips() const noexcept { return flips_; }
    double theta_at(std::uint64_t t) const;

private:
    Rng rng_;
    bool gradual_;
    std::size_t length_;
    double noise_;
    std::uint64_t t_ = 0;
    std::uint64_t flips_ = 0;
};

/// Rotating hyperplane: x ~ U[0,1]^10, class 1 iff sum(w_i x_i) >= theta
/// with theta = sum(w_i)/2 recomputed each step. Weights start U[0,1]; the
/// first two drift by +-drift_per_step (sign drawn once from the seed) with
/// no bound, so the boundary rotates smoothly. Zero drift -> stationary.
class HyperplaneGenerator {
public:
    HyperplaneGenerator(std::uint64_t seed, std::size_t length, double noise,
                        double drift_per_step);

    LabeledInstance next();
    std::uint64_t flips() const noexcept { return flips_; }
    const std::array<double, 10>& weights() const noexcept { return weights_; }

    /// True label of `x` under the generator's initial boundary — a frozen
    /// rule for drift-rate measurements.
    bool initial_rule(std::span<const double> x) const;

private:
    Rng rng_;
    std::size_t length_;
    double noise_;
    double drift_;
    std::array<double, 10> weights_{};
    std::array<double, 10> initial_weights_{};
    std::array<double, 2> drift_sign_{};
    std::uint64_t t_ = 0;
    std::uint64_t flips_ = 0;
};

/// Radial-basis mixture: `centroids` Gaussian blobs in [0,1]^10 with random
/// class (of 5), selection weight and stddev ~ U[0,1]. A sample is
/// centre + random unit direction * (N(0,1) * stddev). Drifting centroids
/// move along fixed random unit directions at `speed` per instance,
/// reflecting at the [0,1] bounds.
class RbfGenerator {
public:
    RbfGenerator(std::uint64_t seed, std::size_t n_centroids, std::size_t n_drifting,
                 double speed);

    LabeledInstance next();

    struct Centroid {
        std::array<double, 10> centre{};
        std::array<double, 10> initial_centre{};
        std::array<double, 10> direction{};
        double weight = 0.0;
        double stddev = 0.0;
        int label = 0;
        bool drifting = false;
    };
    const std::vector<Centroid>& centroids() const noexcept { return centroids_; }

    static constexpr std::size_t kDim = 10;
    static constexpr std::size_t kClasses = 5;

private:
    Rng rng_;
    std::vector<Centroid> centroids_;
    double speed_;
    double total_weight_ = 0.0;
    std::uint64_t t_ = 0;
};

}  // namespace diwe
