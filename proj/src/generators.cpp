#include "diwe/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace diwe {

GeneratorKind generator_kind_from_name(const std::string& name) {
    if (name == "oned_drift") return GeneratorKind::oned_drift;
    if (name == "sea_sudden") return GeneratorKind::sea_sudden;
    if (name == "sea_gradual") return GeneratorKind::sea_gradual;
    if (name == "hyperplane") return GeneratorKind::hyperplane;
    if (name == "rbf") return GeneratorKind::rbf;
    if (name == "rbf_regional") return GeneratorKind::rbf_regional;
    throw ConfigError("unknown generator kind: " + name);
}

std::string generator_kind_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::oned_drift: return "oned_drift";
        case GeneratorKind::sea_sudden: return "sea_sudden";
        case GeneratorKind::sea_gradual: return "sea_gradual";
        case GeneratorKind::hyperplane: return "hyperplane";
        case GeneratorKind::rbf: return "rbf";
        case GeneratorKind::rbf_regional: return "rbf_regional";
    }
    throw std::logic_error("unreachable generator kind");
}

void OnedDriftGenerator::segment_params(std::uint64_t t, int component, double& mean,
                                        double& stddev) {
    if (t <= 1250) {
        mean = component == 0 ? 0.0 : 2.0;
        stddev = component == 0 ? 1.0 : 0.5;
    } else if (t <= 1750) {
        const double ramp = 0.002 * static_cast<double>(t - 1250);
        mean = component == 0 ? 0.0 : 2.0 + ramp;
        stddev = component == 0 ? 1.0 + ramp : 0.5;
    } else if (t <= 2500) {
        mean = component == 0 ? 0.0 : 3.0;
        stddev = component == 0 ? 2.0 : 0.5;
    } else {
        mean = component == 0 ? 0.0 : 5.0;
        stddev = component == 0 ? 2.0 : 0.5;
    }
}

OnedDriftGenerator::Draw OnedDriftGenerator::sample(std::uint64_t t) {
    const int component = rng_.bernoulli(0.5) ? 1 : 0;
    double mean = 0.0, stddev = 1.0;
    segment_params(t, component, mean, stddev);
    return {rng_.gaussian(mean, stddev), component};
}

SeaGenerator::SeaGenerator(std::uint64_t seed, bool gradual, std::size_t length, double noise)
    : rng_(seed), gradual_(gradual), length_(length), noise_(noise) {}

double SeaGenerator::theta_at(std::uint64_t t) const {
    static constexpr double kTheta[4] = {8.0, 9.0, 7.0, 9.5};
    const std::uint64_t quarter = length_ / 4;
    if (gradual_) {
        // Concepts 1 and 2 alternate in 50-instance blocks through the
        // transition window centred on the first boundary.
        const auto win_lo = static_cast<std::uint64_t>(0.225 * static_cast<double>(length_));
        const auto win_hi = static_cast<std::uint64_t>(0.275 * static_cast<double>(length_));
        if (t >= win_lo && t < win_hi) {
            const std::uint64_t block = (t - win_lo) / 50;
            return block % 2 == 0 ? kTheta[1] : kTheta[0];
        }
    }
    std::uint64_t concept_idx = quarter == 0 ? 0 : (t - 1) / quarter;
    if (concept_idx > 3) concept_idx = 3;
    return kTheta[concept_idx];
}

LabeledInstance SeaGenerator::next() {
    ++t_;
    const double x1 = rng_.uniform(0.0, 10.0);
    const double x2 = rng_.uniform(0.0, 10.0);
    const double x3 = rng_.uniform(0.0, 10.0);
    int label = (x1 + x2 <= theta_at(t_)) ? 1 : 0;
    if (noise_ > 0.0 && rng_.bernoulli(noise_)) {
        label = 1 - label;
        ++flips_;
    }
    return {{x1, x2, x3}, label, t_};
}

HyperplaneGenerator::HyperplaneGenerator(std::uint64_t seed, std::size_t length, double noise,
                                         double drift_per_step)
    : rng_(seed), length_(length), noise_(noise), drift_(drift_per_step) {
    for (double& w : weights_) w = rng_.uniform();
    initial_weights_ = weights_;
    for (double& s : drift_sign_) s = rng_.bernoulli(0.5) ? 1.0 : -1.0;
}

bool HyperplaneGenerator::initial_rule(std::span<const double> x) const {
    double sum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < initial_weights_.size(); ++i) {
        sum += initial_weights_[i] * x[i];
        theta += initial_weights_[i];
    }
    return sum >= theta / 2.0;
}

LabeledInstance HyperplaneGenerator::next() {
    ++t_;
    std::vector<double> x(10);
    for (double& v : x) v = rng_.uniform();

    double sum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        sum += weights_[i] * x[i];
        theta += weights_[i];
    }
    int label = (sum >= theta / 2.0) ? 1 : 0;
    if (noise_ > 0.0 && rng_.bernoulli(noise_)) {
        label = 1 - label;
        ++flips_;
    }

    weights_[0] += drift_sign_[0] * drift_;
    weights_[1] += drift_sign_[1] * drift_;
    return {std::move(x), label, t_};
}

RbfGenerator::RbfGenerator(std::uint64_t seed, std::size_t n_centroids, std::size_t n_drifting,
                           double speed)
    : rng_(seed), speed_(speed) {
    centroids_.resize(n_centroids);
    for (std::size_t i = 0; i < n_centroids; ++i) {
        Centroid& c = centroids_[i];
        for (double& v : c.centre) v = rng_.uniform();
        c.initial_centre = c.centre;
        c.label = static_cast<int>(rng_.uniform_int(kClasses));
        c.weight = rng_.uniform();
        c.stddev = rng_.uniform();
        c.drifting = i < n_drifting;
        // unit drift direction (drawn for every centroid so the stream does
        // not depend on how many end up drifting)
        double norm_sq = 0.0;
        for (double& d : c.direction) {
            d = 2.0 * rng_.uniform() - 1.0;
            norm_sq += d * d;
        }
        const double norm = std::sqrt(norm_sq);
        if (norm > 0.0)
            for (double& d : c.direction) d /= norm;
        total_weight_ += c.weight;
    }
}

LabeledInstance RbfGenerator::next() {
    ++t_;
    // weight-proportional centroid choice
    double pick = rng_.uniform() * total_weight_;
    std::size_t chosen = 0;
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
        pick -= centroids_[i].weight;
        if (pick <= 0.0) {
            chosen = i;
            break;
        }
        if (i + 1 == centroids_.size()) chosen = i;
    }
    const Centroid& c = centroids_[chosen];

    std::array<double, kDim> dir{};
    double norm_sq = 0.0;
    for (double& d : dir) {
        d = 2.0 * rng_.uniform() - 1.0;
        norm_sq += d * d;
    }
    const double norm = std::sqrt(norm_sq);
    const double magnitude = rng_.gaussian() * c.stddev;
    std::vector<double> x(kDim);
    for (std::size_t i = 0; i < kDim; ++i)
        x[i] = c.centre[i] + (norm > 0.0 ? dir[i] / norm * magnitude : 0.0);

    // move drifting centroids, reflecting at the unit cube
    for (Centroid& m : centroids_) {
        if (!m.drifting) continue;
        for (std::size_t i = 0; i < kDim; ++i) {
            double v = m.centre[i] + m.direction[i] * speed_;
            if (v > 1.0) {
                v = 2.0 - v;
                m.direction[i] = -m.direction[i];
            } else if (v < 0.0) {
                v = -v;
                m.direction[i] = -m.direction[i];
            }
            m.centre[i] = v;
        }
    }
    return {std::move(x), c.label, t_};
}

Stream generate(const GeneratorSpec& spec) {
    const std::size_t length = spec.effective_length();
    const double noise = spec.effective_noise();
    Stream stream;
    stream.instances.reserve(length);

    switch (spec.kind) {
        case GeneratorKind::oned_drift: {
            stream.schema = {1, 2, {}};
            OnedDriftGenerator gen(spec.seed);
            for (std::uint64_t t = 1; t <= length; ++t)
                stream.instances.push_back({{gen.sample(t).value}, 0, t});
            break;
        }
        case GeneratorKind::sea_sudden:
        case GeneratorKind::sea_gradual: {
            stream.schema = {3, 2, {}};
            SeaGenerator gen(spec.seed, spec.kind == GeneratorKind::sea_gradual, length, noise);
            for (std::size_t i = 0; i < length; ++i) stream.instances.push_back(gen.next());
            break;
        }
        case GeneratorKind::hyperplane: {
            stream.schema = {10, 2, {}};
            HyperplaneGenerator gen(spec.seed, length, noise, spec.drift_per_step);
            for (std::size_t i = 0; i < length; ++i) stream.instances.push_back(gen.next());
            break;
        }
        case GeneratorKind::rbf:
        case GeneratorKind::rbf_regional: {
            stream.schema = {RbfGenerator::kDim, RbfGenerator::kClasses, {}};
            const std::size_t drifting = spec.kind == GeneratorKind::rbf_regional
                                             ? spec.rbf_drifting
                                             : spec.rbf_centroids;
            RbfGenerator gen(spec.seed, spec.rbf_centroids, drifting, spec.drift_per_step);
            for (std::size_t i = 0; i < length; ++i) stream.instances.push_back(gen.next());
            break;
        }
    }
    return stream;
}

}  // namespace diwe
