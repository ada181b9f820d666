#include "diwe/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "diwe/detail/kernels.hpp"
#include "diwe/rng.hpp"

namespace diwe {

PredictionVector ibk_predict(const NeighborPool& pool, std::span<const double> query, int k,
                             std::size_t c) {
    const std::size_t m = pool.count();
    if (m == 0) return PredictionVector::uniform(c);

    const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), m);
    std::vector<double> dist_sq(m);
    detail::row_sq_distances(query.data(), pool.flat_features.data(), m, pool.dim,
                             dist_sq.data());

    // Keep the k nearest in a small sorted scratch; order is
    // (distance, arrival index) so boundary ties are deterministic.
    auto closer = [&](std::uint32_t a, std::uint32_t b) {
        if (dist_sq[a] != dist_sq[b]) return dist_sq[a] < dist_sq[b];
        return pool.arrivals[a] < pool.arrivals[b];
    };
    std::vector<std::uint32_t> top;
    top.reserve(k_eff);
    for (std::uint32_t i = 0; i < m; ++i) {
        if (top.size() == k_eff && !closer(i, top.back())) continue;
        auto pos = std::upper_bound(top.begin(), top.end(), i, closer);
        if (top.size() == k_eff) top.pop_back();
        top.insert(pos, i);
    }

    // Exact match: the 1/d weight diverges, so the earliest coincident
    // neighbor decides outright. Coincident points sort by arrival, so the
    // front of the list is the earliest one.
    if (dist_sq[top.front()] == 0.0) return PredictionVector::one_hot(c, pool.labels[top.front()]);

    PredictionVector out{std::vector<double>(c, 0.0)};
    double total = 0.0;
    for (const std::uint32_t idx : top) {
        const double w = 1.0 / std::sqrt(dist_sq[idx]);
        out.probs[static_cast<std::size_t>(pool.labels[idx])] += w;
        total += w;
    }
    for (double& p : out.probs) p /= total;
    return out;
}

PredictionVector ibk_predict(std::span<const LabeledInstance> training,
                             std::span<const double> query, int k, std::size_t c) {
    if (training.empty()) return PredictionVector::uniform(c);
    const std::size_t dim = training.front().features.size();
    std::vector<double> flat;
    flat.reserve(training.size() * dim);
    std::vector<int> labels;
    std::vector<std::uint64_t> arrivals;
    labels.reserve(training.size());
    arrivals.reserve(training.size());
    for (const LabeledInstance& inst : training) {
        flat.insert(flat.end(), inst.features.begin(), inst.features.end());
        labels.push_back(inst.label);
        arrivals.push_back(inst.t);
    }
    return ibk_predict(NeighborPool{flat, labels, arrivals, dim}, query, k, c);
}

VoteResult soft_majority_vote(std::span<const PredictionVector> vectors) {
    if (vectors.empty()) throw std::invalid_argument("soft_majority_vote: no vectors");
    const std::size_t c = vectors.front().probs.size();
    VoteResult result;
    result.combined.assign(c, 0.0);
    for (const PredictionVector& v : vectors) {
        if (v.probs.size() != c)
            throw std::invalid_argument("soft_majority_vote: vector length mismatch");
        for (std::size_t j = 0; j < c; ++j) result.combined[j] += v.probs[j];
    }
    result.label = static_cast<int>(std::max_element(result.combined.begin(),
                                                     result.combined.end()) -
                                    result.combined.begin());
    return result;
}

std::vector<double> DiweConfig::default_phi_grid() {
    std::vector<double> grid;
    grid.reserve(20);
    for (int i = 1; i <= 20; ++i) grid.push_back(0.025 * i);
    return grid;
}

void DiweConfig::validate() const {
    if (phi_grid.empty()) throw ConfigError("config: phi_grid must not be empty");
    double prev = 0.0;
    for (double phi : phi_grid) {
        if (!(phi > 0.0) || !(phi <= 0.5))
            throw ConfigError("config: phi values must lie in (0, 0.5]");
        if (phi <= prev) throw ConfigError("config: phi_grid must be strictly ascending");
        prev = phi;
    }
    if (voting_size < 1 || static_cast<std::size_t>(voting_size) > phi_grid.size())
        throw ConfigError("config: voting_size must lie in [1, |phi_grid|]");
    if (k < 1) throw ConfigError("config: k must be >= 1");
    if (max_buffer < 1) throw ConfigError("config: max_buffer must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("config: alpha must lie in (0,1)");
    if (select_every < 1) throw ConfigError("config: select_every must be >= 1");
}

Diwe::Diwe(DiweConfig config, StreamSchema schema, std::span<const LabeledInstance> training)
    : config_(std::move(config)), schema_(std::move(schema)) {
    config_.validate();
    schema_.validate();
    for (const LabeledInstance& inst : training)
        if (auto why = validate_instance(inst, schema_))
            throw DataError("training instance t=" + std::to_string(inst.t) + ": " + *why);

    family_.members.reserve(config_.phi_grid.size());
    for (double phi : config_.phi_grid)
        family_.members.push_back(RegionSet::initialize(phi, training, config_.max_buffer));
    selection_ = max_rdd_select(family_, config_.voting_size);
}

void Diwe::use_random_selection(std::uint64_t selection_seed) {
    mode_ = SelectionMode::random;
    selection_seed_ = selection_seed;
    selection_draws_ = 0;
    reselect();
}

void Diwe::reselect() {
    if (mode_ == SelectionMode::max_rdd) {
        selection_ = max_rdd_select(family_, config_.voting_size);
        return;
    }
    // Random subset via partial Fisher-Yates; one generator per draw keeps
    // the sequence independent of checkpoint boundaries.
    Rng rng(selection_seed_ + 0x9e3779b97f4a7c15ULL * ++selection_draws_);
    const int n = static_cast<int>(family_.size());
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < config_.voting_size; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    }
    ids.resize(static_cast<std::size_t>(config_.voting_size));
    std::sort(ids.begin(), ids.end());
    selection_.indices = std::move(ids);
    selection_.diversity = 0.0;
    if (config_.voting_size >= 2) {  // diversity of the random draw, for the trace
        double sum = 0.0;
        for (std::size_t later = 1; later < selection_.indices.size(); ++later)
            for (std::size_t earlier = 0; earlier < later; ++earlier)
                sum += rdd(family_.members[static_cast<std::size_t>(selection_.indices[earlier])],
                           family_.members[static_cast<std::size_t>(selection_.indices[later])]);
        const auto k = static_cast<double>(config_.voting_size);
        selection_.diversity = (2.0 * sum) / (k * (k - 1.0));
    }
}

PredictionVector Diwe::predict(std::span<const double> query) const {
    std::vector<PredictionVector> votes;
    votes.reserve(selection_.indices.size());
    for (int idx : selection_.indices) {
        const RegionSet& rs = family_.members[static_cast<std::size_t>(idx)];
        votes.push_back(ibk_predict(NeighborPool::of(rs), query, config_.k, schema_.c));
    }
    VoteResult vote = soft_majority_vote(votes);
    const double scale = 1.0 / static_cast<double>(votes.size());
    PredictionVector out{std::move(vote.combined)};
    for (double& p : out.probs) p *= scale;
    return out;
}

Diwe::StepResult Diwe::step(const LabeledInstance& inst) {
    if (auto why = validate_instance(inst, schema_))
        throw DataError("instance t=" + std::to_string(inst.t) + ": " + *why);

    if (steps_ > 0 && steps_ % static_cast<std::uint64_t>(config_.select_every) == 0) reselect();

    StepResult result;
    result.probs = predict(inst.features);
    result.predicted = static_cast<int>(std::max_element(result.probs.probs.begin(),
                                                         result.probs.probs.end()) -
                                        result.probs.probs.begin());

    // Only now may the label be consumed: every family member trains.
    for (RegionSet& rs : family_.members) rs.observe(inst, config_.alpha);
    ++steps_;
    return result;
}

std::vector<std::size_t> Diwe::buffer_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(family_.size());
    for (const RegionSet& rs : family_.members) sizes.push_back(rs.size());
    return sizes;
}

namespace {

constexpr std::uint32_t kStateMagic = 0x44695745;  // "DiWE"
constexpr std::uint32_t kStateVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("ensemble checkpoint: truncated input");
    return v;
}

}  // namespace

void Diwe::save(std::ostream& out) const {
    put(out, kStateMagic);
    put(out, kStateVersion);
    put(out, static_cast<std::uint64_t>(config_.phi_grid.size()));
    for (double phi : config_.phi_grid) put(out, phi);
    put(out, static_cast<std::int32_t>(config_.voting_size));
    put(out, static_cast<std::int32_t>(config_.k));
    put(out, static_cast<std::uint64_t>(config_.max_buffer));
    put(out, config_.alpha);
    put(out, static_cast<std::int32_t>(config_.select_every));
    put(out, static_cast<std::uint64_t>(schema_.n));
    put(out, static_cast<std::uint64_t>(schema_.c));
    put(out, steps_);
    put(out, static_cast<std::uint32_t>(mode_));
    put(out, selection_seed_);
    put(out, selection_draws_);
    put(out, static_cast<std::uint64_t>(selection_.indices.size()));
    for (int idx : selection_.indices) put(out, static_cast<std::int32_t>(idx));
    put(out, selection_.diversity);
    for (const RegionSet& rs : family_.members) rs.save(out);
    if (!out) throw DataError("ensemble checkpoint: write failed");
}

Diwe Diwe::load(std::istream& in) {
    if (get<std::uint32_t>(in) != kStateMagic) throw DataError("ensemble checkpoint: bad magic");
    if (get<std::uint32_t>(in) != kStateVersion)
        throw DataError("ensemble checkpoint: unsupported version");

    DiweConfig config;
    config.phi_grid.clear();
    const auto grid_size = get<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < grid_size; ++i) config.phi_grid.push_back(get<double>(in));
    config.voting_size = get<std::int32_t>(in);
    config.k = get<std::int32_t>(in);
    config.max_buffer = static_cast<std::size_t>(get<std::uint64_t>(in));
    config.alpha = get<double>(in);
    config.select_every = get<std::int32_t>(in);

    StreamSchema schema;
    schema.n = static_cast<std::size_t>(get<std::uint64_t>(in));
    schema.c = static_cast<std::size_t>(get<std::uint64_t>(in));

    Diwe diwe(config, schema);
    diwe.family_.members.clear();
    diwe.steps_ = get<std::uint64_t>(in);
    diwe.mode_ = static_cast<SelectionMode>(get<std::uint32_t>(in));
    diwe.selection_seed_ = get<std::uint64_t>(in);
    diwe.selection_draws_ = get<std::uint64_t>(in);
    const auto sel_size = get<std::uint64_t>(in);
    diwe.selection_.indices.clear();
    for (std::uint64_t i = 0; i < sel_size; ++i)
        diwe.selection_.indices.push_back(get<std::int32_t>(in));
    diwe.selection_.diversity = get<double>(in);
    for (std::uint64_t i = 0; i < grid_size; ++i)
        diwe.family_.members.push_back(RegionSet::load(in));
    return diwe;
}

}  // namespace diwe
