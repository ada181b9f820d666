#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diwe/ensemble.hpp"
#include "diwe/generators.hpp"
#include "diwe/instance.hpp"

namespace diwe {

/// Runs fn(0..jobs-1) on up to `threads` workers (0 = hardware). Each job
/// writes only its own slot, so results are order-independent; the first
/// exception is rethrown after all workers drained.
void parallel_for(std::size_t jobs, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

struct RunStat {
    std::vector<double> values;
    double mean = 0.0;
    double sd = 0.0;
};
RunStat summarize(std::vector<double> values);

/// Single-member drift-removal run: feeds one oned_drift stream to a lone
/// phi-level region set and returns the buffer size after each step
/// (index t-1).
std::vector<std::size_t> exp1_buffer_trace(std::uint64_t seed, double phi = 0.1,
                                           double alpha = 0.01, std::size_t max_buffer = 1000);

/// Prequential accuracy of DiwE on a stream; `random_selection_seed` swaps
/// Max-RDD for uniformly random subsets.
double diwe_accuracy(const Stream& stream, const DiweConfig& config,
                     std::optional<std::uint64_t> random_selection_seed = std::nullopt);

/// Prequential accuracy of the sliding-window kNN baseline.
double baseline_accuracy(const Stream& stream, std::size_t window, int k);

struct ExperimentOptions {
    std::string out_dir;
    int runs = 10;
    std::uint64_t base_seed = 1;
    std::size_t length = 0;  // 0 -> generator default
    DiweConfig config;
    std::size_t threads = 0;
    std::vector<GeneratorKind> kinds = {
        GeneratorKind::sea_sudden, GeneratorKind::sea_gradual, GeneratorKind::hyperplane,
        GeneratorKind::rbf, GeneratorKind::rbf_regional};
    int random_draws = 50;                       // exp4
    std::vector<int> voting_sizes;               // exp5; empty -> 5..16
    std::vector<std::size_t> buffer_sizes = {500, 1000, 2000};  // exp5
};

/// Named experiment runners. Each writes run CSVs plus a summary.json under
/// out_dir and returns the summary JSON text. Unknown names -> ConfigError.
std::string run_experiment(const std::string& name, const ExperimentOptions& options);

}  // namespace diwe
