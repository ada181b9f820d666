#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace diwe {

/// One labeled observation of a data stream. `t` is the 1-based arrival
/// index (discrete time); it doubles as the identity key of the instance
/// everywhere a set of stored instances is intersected or deduplicated.
struct LabeledInstance {
    std::vector<double> features;
    int label = 0;
    std::uint64_t t = 0;

    bool operator==(const LabeledInstance&) const = default;
};

/// Declared shape of a stream: feature count and class count.
struct StreamSchema {
    std::size_t n = 0;
    std::size_t c = 0;
    std::vector<std::string> class_names;  // optional, may be empty

    void validate() const {
        if (n < 1) throw std::invalid_argument("schema: feature count must be >= 1");
        if (c < 2) throw std::invalid_argument("schema: class count must be >= 2");
    }
};

/// A finite stream materialized in memory, in arrival order.
struct Stream {
    StreamSchema schema;
    std::vector<LabeledInstance> instances;
};

/// Squared Euclidean distance, no dimension check. The comparison-only hot
/// paths (hit tests, neighbor ranking) work on squared distances throughout
/// so that sqrt never enters a tie-sensitive comparison.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

/// Euclidean distance between two equal-dimension vectors.
inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean_distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    return std::sqrt(squared_distance(a, b));
}

/// Checks an instance against a schema. Returns an explanation on failure,
/// std::nullopt when the instance is acceptable.
inline std::optional<std::string> validate_instance(const LabeledInstance& inst,
                                                    const StreamSchema& schema) {
    if (inst.features.size() != schema.n)
        return "dimension " + std::to_string(inst.features.size()) + " != schema " +
               std::to_string(schema.n);
    if (inst.label < 0 || static_cast<std::size_t>(inst.label) >= schema.c)
        return "label " + std::to_string(inst.label) + " out of range [0," +
               std::to_string(schema.c) + ")";
    return std::nullopt;
}

/// Configuration problems (bad flags, bad config file). CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Data problems (missing/malformed inputs). CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace diwe
