#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "diwe/diversity.hpp"
#include "diwe/instance.hpp"
#include "diwe/region_set.hpp"

namespace diwe {

/// Per-class probability vector emitted by one ensembler (sums to 1).
struct PredictionVector {
    std::vector<double> probs;

    static PredictionVector uniform(std::size_t c) {
        return {std::vector<double>(c, 1.0 / static_cast<double>(c))};
    }
    static PredictionVector one_hot(std::size_t c, int label) {
        PredictionVector v{std::vector<double>(c, 0.0)};
        v.probs[static_cast<std::size_t>(label)] = 1.0;
        return v;
    }
    bool operator==(const PredictionVector&) const = default;
};

/// Flat view of a training pool for the k-NN kernel.
struct NeighborPool {
    std::span<const double> flat_features;  // count x dim, row-major
    std::span<const int> labels;
    std::span<const std::uint64_t> arrivals;
    std::size_t dim = 0;

    std::size_t count() const noexcept { return labels.size(); }
    static NeighborPool of(const RegionSet& rs) {
        return {rs.feature_matrix(), rs.labels(), rs.arrivals(), rs.dim()};
    }
};

/**
 * Inverse-distance-weighted IBk class probabilities for `query` over the k
 * nearest pool members (all of them when fewer than k exist). Each neighbor
 * at distance d contributes weight 1/d to its class; a zero-distance
 * neighbor short-circuits to a one-hot vector on its class (earliest arrival
 * wins when several coincide). Empty pool -> uniform vector. Neighbor order
 * is (distance, arrival index), so boundary ties are deterministic.
 */
PredictionVector ibk_predict(const NeighborPool& pool, std::span<const double> query, int k,
                             std::size_t c);

/// Convenience overload over materialized instances.
PredictionVector ibk_predict(std::span<const LabeledInstance> training,
                             std::span<const double> query, int k, std::size_t c);

/// Soft majority vote: elementwise sum of the member vectors plus the argmax
/// label (lowest class index on ties). `combined` is the raw sum — it totals
/// the number of voters, not 1.
struct VoteResult {
    int label = 0;
    std::vector<double> combined;
};
VoteResult soft_majority_vote(std::span<const PredictionVector> vectors);

/// Knobs of the ensemble. Defaults follow the standard parameterization:
/// 20-point phi grid, 10 voters, IBk with k=5, buffers of 1000, alpha 0.01.
struct DiweConfig {
    std::vector<double> phi_grid = default_phi_grid();
    int voting_size = 10;
    int k = 5;
    std::size_t max_buffer = 1000;
    double alpha = 0.01;
    int select_every = 1;

    static std::vector<double> default_phi_grid();
    /// Throws ConfigError when any field is out of its domain.
    void validate() const;
    bool operator==(const DiweConfig&) const = default;
};

/// How the voting subset is chosen each step.
enum class SelectionMode { max_rdd, random };

/**
 * The diverse instance weighting ensemble. Keeps one region set per phi in
 * the grid; per instance it (1) refreshes the voting subset by Max-RDD on
 * the select_every cadence, (2) lets every selected member vote via IBk
 * over its stored cores, (3) soft-majority-combines the votes — all before
 * the label is touched — and then (4) feeds the labeled instance to every
 * region set in the family, selected or not.
 *
 * Deterministic: fixed config + stream reproduces the prediction sequence.
 * A step is single-writer; reads are safe between steps.
 */
class Diwe {
public:
    Diwe(DiweConfig config, StreamSchema schema,
         std::span<const LabeledInstance> training = {});

    struct StepResult {
        int predicted = 0;
        PredictionVector probs;  // combined vote rescaled to sum 1
    };

    /// Predict-then-train on one instance.
    StepResult step(const LabeledInstance& inst);

    /// Pure prediction with the current selection; never touches labels.
    PredictionVector predict(std::span<const double> query) const;

    /// Replaces Max-RDD with a uniformly random size-voting_size subset
    /// drawn per selection (ablation / baseline mode).
    void use_random_selection(std::uint64_t selection_seed);

    const DiweConfig& config() const noexcept { return config_; }
    const StreamSchema& schema() const noexcept { return schema_; }
    const RegionSetFamily& family() const noexcept { return family_; }
    const EnsembleSelection& selection() const noexcept { return selection_; }
    std::uint64_t steps() const noexcept { return steps_; }
    std::vector<std::size_t> buffer_sizes() const;

    /// Checkpoint of config + schema + step counter + selection + every
    /// region set; restore resumes bit-identically.
    void save(std::ostream& out) const;
    static Diwe load(std::istream& in);

    bool operator==(const Diwe& other) const {
        return config_ == other.config_ && schema_.n == other.schema_.n &&
               schema_.c == other.schema_.c && family_.members == other.family_.members &&
               selection_ == other.selection_ && steps_ == other.steps_;
    }

private:
    void reselect();

    DiweConfig config_;
    StreamSchema schema_;
    RegionSetFamily family_;
    EnsembleSelection selection_;
    std::uint64_t steps_ = 0;

    SelectionMode mode_ = SelectionMode::max_rdd;
    std::uint64_t selection_seed_ = 0;
    std::uint64_t selection_draws_ = 0;  // keeps random mode reproducible across checkpoints
};

}  // namespace diwe
