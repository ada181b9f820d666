#include "diwe/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "diwe/prequential.hpp"
#include "diwe/region_set.hpp"

namespace diwe {

using nlohmann::json;

void parallel_for(std::size_t jobs, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

RunStat summarize(std::vector<double> values) {
    RunStat stat;
    stat.values = std::move(values);
    if (stat.values.empty()) return stat;
    double sum = 0.0;
    for (double v : stat.values) sum += v;
    stat.mean = sum / static_cast<double>(stat.values.size());
    if (stat.values.size() > 1) {
        double sq = 0.0;
        for (double v : stat.values) sq += (v - stat.mean) * (v - stat.mean);
        stat.sd = std::sqrt(sq / static_cast<double>(stat.values.size() - 1));
    }
    return stat;
}

std::vector<std::size_t> exp1_buffer_trace(std::uint64_t seed, double phi, double alpha,
                                           std::size_t max_buffer) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::oned_drift;
    spec.seed = seed;
    const Stream stream = generate(spec);

    RegionSet member(phi, max_buffer);
    std::vector<std::size_t> sizes;
    sizes.reserve(stream.instances.size());
    for (const LabeledInstance& inst : stream.instances) {
        member.observe(inst, alpha);
        sizes.push_back(member.size());
    }
    return sizes;
}

double diwe_accuracy(const Stream& stream, const DiweConfig& config,
                     std::optional<std::uint64_t> random_selection_seed) {
    Diwe model(config, stream.schema);
    if (random_selection_seed) model.use_random_selection(*random_selection_seed);
    DiweLearner learner(std::move(model));
    return prequential_run(learner, stream, /*keep_records=*/false).accuracy();
}

double baseline_accuracy(const Stream& stream, std::size_t window, int k) {
    SlidingWindowKnn learner(window, k, stream.schema);
    return prequential_run(learner, stream, /*keep_records=*/false).accuracy();
}

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path);
    out << text;
    if (!out) throw DataError("write failed: " + path);
}

json config_json(const DiweConfig& c) {
    return json{{"phi_grid", c.phi_grid},   {"voting_size", c.voting_size},
                {"k", c.k},                 {"max_buffer", c.max_buffer},
                {"alpha", c.alpha},         {"select_every", c.select_every}};
}

std::string finish(const std::string& out_dir, json summary) {
    const std::string text = summary.dump(2) + "\n";
    if (!out_dir.empty()) write_text(out_dir + "/summary.json", text);
    return text;
}

std::string run_exp1(const ExperimentOptions& opt) {
    const int runs = opt.runs;
    std::vector<std::vector<std::size_t>> traces(static_cast<std::size_t>(runs));
    parallel_for(static_cast<std::size_t>(runs), opt.threads, [&](std::size_t i) {
        traces[i] = exp1_buffer_trace(opt.base_seed + i, 0.1, opt.config.alpha,
                                      opt.config.max_buffer);
    });

    json runs_json = json::array();
    for (int i = 0; i < runs; ++i) {
        const auto& sizes = traces[static_cast<std::size_t>(i)];
        if (!opt.out_dir.empty()) {
            std::ofstream out(opt.out_dir + "/exp1_seed" + std::to_string(opt.base_seed + static_cast<std::uint64_t>(i)) + ".csv");
            out << "t,buffer_size\n";
            for (std::size_t t = 0; t < sizes.size(); ++t)
                out << (t + 1) << ',' << sizes[t] << '\n';
        }
        runs_json.push_back({{"seed", opt.base_seed + static_cast<std::uint64_t>(i)},
                             {"buf_t2400", sizes[2399]},
                             {"buf_t2750", sizes[2749]},
                             {"buf_t4000", sizes[3999]}});
    }
    return finish(opt.out_dir, json{{"experiment", "exp1_removal"},
                                    {"phi", 0.1},
                                    {"alpha", opt.config.alpha},
                                    {"max_buffer", opt.config.max_buffer},
                                    {"runs", runs_json}});
}

std::string run_exp2(const ExperimentOptions& opt) {
    json datasets = json::array();
    for (GeneratorKind kind : opt.kinds) {
        std::vector<double> accs(static_cast<std::size_t>(opt.runs));
        parallel_for(static_cast<std::size_t>(opt.runs), opt.threads, [&](std::size_t i) {
            GeneratorSpec spec;
            spec.kind = kind;
            spec.seed = opt.base_seed + i;
            spec.length = opt.length;
            accs[i] = diwe_accuracy(generate(spec), opt.config);
        });
        const RunStat stat = summarize(accs);
        datasets.push_back({{"dataset", generator_kind_name(kind)},
                            {"runs", opt.runs},
                            {"accuracy_mean", stat.mean},
                            {"accuracy_sd", stat.sd},
                            {"accuracies", stat.values}});
    }
    return finish(opt.out_dir, json{{"experiment", "exp2_synthetic"},
                                    {"base_seed", opt.base_seed},
                                    {"length", opt.length},
                                    {"config", config_json(opt.config)},
                                    {"datasets", datasets}});
}

std::string run_exp4(const ExperimentOptions& opt) {
    struct Row {
        GeneratorKind kind;
        std::uint64_t seed;
        double max_rdd = 0.0;
        RunStat random;
    };
    std::vector<Row> rows;
    for (GeneratorKind kind : opt.kinds)
        for (int r = 0; r < opt.runs; ++r)
            rows.push_back({kind, opt.base_seed + static_cast<std::uint64_t>(r), 0.0, {}});

    // one Max-RDD run + `random_draws` random-selection runs per stream
    const std::size_t draws = static_cast<std::size_t>(opt.random_draws);
    const std::size_t jobs = rows.size() * (draws + 1);
    std::vector<double> results(jobs);
    parallel_for(jobs, opt.threads, [&](std::size_t j) {
        const std::size_t row = j / (draws + 1);
        const std::size_t variant = j % (draws + 1);
        GeneratorSpec spec;
        spec.kind = rows[row].kind;
        spec.seed = rows[row].seed;
        spec.length = opt.length;
        const Stream stream = generate(spec);
        results[j] = variant == 0
                         ? diwe_accuracy(stream, opt.config)
                         : diwe_accuracy(stream, opt.config, 1000003ULL * row + variant);
    });

    json streams = json::array();
    double gap_sum = 0.0, maxrdd_sum = 0.0, random_sum = 0.0;
    for (std::size_t row = 0; row < rows.size(); ++row) {
        rows[row].max_rdd = results[row * (draws + 1)];
        std::vector<double> random_accs(results.begin() + static_cast<std::ptrdiff_t>(row * (draws + 1) + 1),
                                        results.begin() + static_cast<std::ptrdiff_t>((row + 1) * (draws + 1)));
        rows[row].random = summarize(std::move(random_accs));
        const double gap = rows[row].max_rdd - rows[row].random.mean;
        gap_sum += gap;
        maxrdd_sum += rows[row].max_rdd;
        random_sum += rows[row].random.mean;
        streams.push_back({{"dataset", generator_kind_name(rows[row].kind)},
                           {"seed", rows[row].seed},
                           {"max_rdd_accuracy", rows[row].max_rdd},
                           {"random_mean", rows[row].random.mean},
                           {"random_sd", rows[row].random.sd},
                           {"gap", gap}});
    }
    const auto n = static_cast<double>(rows.size());
    return finish(opt.out_dir, json{{"experiment", "exp4_maxrdd_vs_random"},
                                    {"random_draws", opt.random_draws},
                                    {"length", opt.length},
                                    {"config", config_json(opt.config)},
                                    {"streams", streams},
                                    {"max_rdd_mean", maxrdd_sum / n},
                                    {"random_mean", random_sum / n},
                                    {"mean_gap", gap_sum / n}});
}

std::string run_exp5(const ExperimentOptions& opt) {
    std::vector<int> voting = opt.voting_sizes;
    if (voting.empty())
        for (int v = 5; v <= 16; ++v) voting.push_back(v);

    struct Cell {
        int voting_size;
        std::size_t max_buffer;
    };
    std::vector<Cell> cells;
    for (int v : voting) cells.push_back({v, opt.config.max_buffer});
    for (std::size_t w : opt.buffer_sizes)
        cells.push_back({opt.config.voting_size, w});

    json sweep = json::array();
    for (const Cell& cell : cells) {
        DiweConfig config = opt.config;
        config.voting_size = cell.voting_size;
        config.max_buffer = cell.max_buffer;
        json accs = json::array();
        double mean_over_kinds = 0.0;
        for (GeneratorKind kind : opt.kinds) {
            std::vector<double> runs(static_cast<std::size_t>(opt.runs));
            parallel_for(runs.size(), opt.threads, [&](std::size_t i) {
                GeneratorSpec spec;
                spec.kind = kind;
                spec.seed = opt.base_seed + i;
                spec.length = opt.length;
                runs[i] = diwe_accuracy(generate(spec), config);
            });
            const RunStat stat = summarize(runs);
            mean_over_kinds += stat.mean;
            accs.push_back({{"dataset", generator_kind_name(kind)},
                            {"accuracy_mean", stat.mean},
                            {"accuracy_sd", stat.sd}});
        }
        sweep.push_back({{"voting_size", cell.voting_size},
                         {"max_buffer", cell.max_buffer},
                         {"datasets", accs},
                         {"mean_accuracy", mean_over_kinds / static_cast<double>(opt.kinds.size())}});
    }
    return finish(opt.out_dir, json{{"experiment", "exp5_sensitivity"},
                                    {"length", opt.length},
                                    {"base_config", config_json(opt.config)},
                                    {"sweep", sweep}});
}

}  // namespace

std::string run_experiment(const std::string& name, const ExperimentOptions& options) {
    if (!options.out_dir.empty()) ensure_dir(options.out_dir);
    if (name == "exp1_removal") return run_exp1(options);
    if (name == "exp2_synthetic") return run_exp2(options);
    if (name == "exp4_maxrdd_vs_random") return run_exp4(options);
    if (name == "exp5_sensitivity") return run_exp5(options);
    throw ConfigError("unknown experiment: " + name);
}

}  // namespace diwe
