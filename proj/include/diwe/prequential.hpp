#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diwe/ensemble.hpp"
#include "diwe/instance.hpp"

namespace diwe {

/// Per-step optional diagnostics a learner can surface into the trace.
struct TraceExtras {
    double diversity = 0.0;
    std::vector<int> selected;
    std::vector<std::size_t> buffer_sizes;
};

/// Test-then-train contract: process() must fix its prediction before
/// reading the instance's label.
class OnlineLearner {
public:
    virtual ~OnlineLearner() = default;
    virtual int process(const LabeledInstance& inst) = 0;
    virtual TraceExtras extras() const { return {}; }
};

/// One prequential step as recorded in a trace file.
struct TraceRecord {
    std::uint64_t t = 0;
    int predicted = 0;
    int actual = 0;
    double running_accuracy = 0.0;  // correct_so_far / t, exact integer ratio
    double diversity = 0.0;
    std::vector<int> selected;
    std::vector<std::size_t> buffer_sizes;
    double step_ms = 0.0;
};

struct PrequentialTrace {
    std::vector<double> phi_grid;  // column headers for buffer sizes
    std::vector<TraceRecord> records;
    std::uint64_t correct = 0;
    std::uint64_t total = 0;

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

/**
 * Interleaved test-then-train over the stream: for every instance the
 * learner's prediction is recorded, graded against the true label, and only
 * then is the labeled instance available for training (the learner's
 * process() implements both halves). Schema mismatches abort with a
 * positioned DataError.
 *
 * `keep_records` can be turned off for accuracy-only runs; counters are
 * kept either way.
 */
PrequentialTrace prequential_run(OnlineLearner& learner, const Stream& stream,
                                 bool keep_records = true,
                                 const std::function<void(const TraceRecord&)>& on_step = {});

/// Writes a trace as CSV: t,pred,true,acc,div,selected,buf_phi_<phi...>,step_ms.
void write_trace_csv(const PrequentialTrace& trace, const std::string& path);

/// DiwE behind the OnlineLearner interface.
class DiweLearner final : public OnlineLearner {
public:
    explicit DiweLearner(Diwe diwe) : diwe_(std::move(diwe)) {}

    int process(const LabeledInstance& inst) override {
        return diwe_.step(inst).predicted;
    }
    TraceExtras extras() const override {
        return {diwe_.selection().diversity, diwe_.selection().indices, diwe_.buffer_sizes()};
    }

    Diwe& model() noexcept { return diwe_; }
    const Diwe& model() const noexcept { return diwe_; }

private:
    Diwe diwe_;
};

/// kNN over the last `window` labeled instances, predictions via the same
/// inverse-distance IBk kernel the ensemble uses. Requires window >= k.
class SlidingWindowKnn final : public OnlineLearner {
public:
    SlidingWindowKnn(std::size_t window, int k, StreamSchema schema);

    int process(const LabeledInstance& inst) override;
    PredictionVector predict(std::span<const double> query) const;
    std::size_t stored() const noexcept { return labels_.size(); }

private:
    void push(const LabeledInstance& inst);

    std::size_t window_;
    int k_;
    StreamSchema schema_;
    // ring storage kept flat for the distance kernel
    std::vector<double> flat_;
    std::vector<int> labels_;
    std::vector<std::uint64_t> arrivals_;
    std::size_t head_ = 0;  // oldest slot once full
};

}  // namespace diwe
