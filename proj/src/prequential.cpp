#include "diwe/prequential.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace diwe {

PrequentialTrace prequential_run(OnlineLearner& learner, const Stream& stream, bool keep_records,
                                 const std::function<void(const TraceRecord&)>& on_step) {
    PrequentialTrace trace;
    if (keep_records) trace.records.reserve(stream.instances.size());

    for (const LabeledInstance& inst : stream.instances) {
        if (auto why = validate_instance(inst, stream.schema))
            throw DataError("stream instance t=" + std::to_string(inst.t) + ": " + *why);

        const auto begin = std::chrono::steady_clock::now();
        const int predicted = learner.process(inst);
        const auto end = std::chrono::steady_clock::now();

        ++trace.total;
        if (predicted == inst.label) ++trace.correct;

        if (keep_records || on_step) {
            TraceRecord rec;
            rec.t = inst.t;
            rec.predicted = predicted;
            rec.actual = inst.label;
            rec.running_accuracy =
                static_cast<double>(trace.correct) / static_cast<double>(trace.total);
            TraceExtras extras = learner.extras();
            rec.diversity = extras.diversity;
            rec.selected = std::move(extras.selected);
            rec.buffer_sizes = std::move(extras.buffer_sizes);
            rec.step_ms = std::chrono::duration<double, std::milli>(end - begin).count();
            if (on_step) on_step(rec);
            if (keep_records) trace.records.push_back(std::move(rec));
        }
    }
    return trace;
}

void write_trace_csv(const PrequentialTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open trace file for writing: " + path);

    out << "t,pred,true,acc,div,selected";
    for (double phi : trace.phi_grid) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", phi);
        out << ",buf_phi_" << buf;
    }
    out << ",step_ms\n";

    char num[64];
    for (const TraceRecord& rec : trace.records) {
        out << rec.t << ',' << rec.predicted << ',' << rec.actual << ',';
        std::snprintf(num, sizeof(num), "%.9f", rec.running_accuracy);
        out << num << ',';
        std::snprintf(num, sizeof(num), "%.9f", rec.diversity);
        out << num << ',';
        for (std::size_t i = 0; i < rec.selected.size(); ++i) {
            if (i) out << ';';
            out << rec.selected[i];
        }
        for (std::size_t i = 0; i < trace.phi_grid.size(); ++i) {
            out << ',';
            if (i < rec.buffer_sizes.size()) out << rec.buffer_sizes[i];
        }
        std::snprintf(num, sizeof(num), "%.6f", rec.step_ms);
        out << ',' << num << '\n';
    }
    if (!out) throw DataError("trace write failed: " + path);
}

SlidingWindowKnn::SlidingWindowKnn(std::size_t window, int k, StreamSchema schema)
    : window_(window), k_(k), schema_(std::move(schema)) {
    schema_.validate();
    if (k_ < 1) throw ConfigError("sliding window knn: k must be >= 1");
    if (window_ < static_cast<std::size_t>(k_))
        throw ConfigError("sliding window knn: window must be >= k");
    flat_.reserve(window_ * schema_.n);
}

void SlidingWindowKnn::push(const LabeledInstance& inst) {
    if (labels_.size() < window_) {
        flat_.insert(flat_.end(), inst.features.begin(), inst.features.end());
        labels_.push_back(inst.label);
        arrivals_.push_back(inst.t);
        return;
    }
    std::copy(inst.features.begin(), inst.features.end(), flat_.begin() + static_cast<std::ptrdiff_t>(head_ * schema_.n));
    labels_[head_] = inst.label;
    arrivals_[head_] = inst.t;
    head_ = (head_ + 1) % window_;
}

PredictionVector SlidingWindowKnn::predict(std::span<const double> query) const {
    return ibk_predict(NeighborPool{flat_, labels_, arrivals_, schema_.n}, query, k_, schema_.c);
}

int SlidingWindowKnn::process(const LabeledInstance& inst) {
    const PredictionVector probs = predict(inst.features);
    const int predicted = static_cast<int>(
        std::max_element(probs.probs.begin(), probs.probs.end()) - probs.probs.begin());
    push(inst);
    return predicted;
}

}  // namespace diwe
