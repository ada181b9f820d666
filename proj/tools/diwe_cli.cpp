// Command-line front end: stream generation, prequential runs of the DiwE
// ensemble and the sliding-window baseline, and the benchmark experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diwe/config_io.hpp"
#include "diwe/csv.hpp"
#include "diwe/ensemble.hpp"
#include "diwe/experiments.hpp"
#include "diwe/generators.hpp"
#include "diwe/prequential.hpp"

namespace {

using nlohmann::json;

struct IngestionFlags {
    std::string label_column;
    std::vector<std::string> nominal_columns;
    std::size_t fit_prefix = 0;
    bool no_normalize = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--label-col", label_column,
                        "Label column name (default: 'label' or the last column)");
        cmd->add_option("--nominal-cols", nominal_columns,
                        "Comma-separated nominal columns to one-hot expand")
            ->delimiter(',');
        cmd->add_option("--fit-prefix", fit_prefix,
                        "Fit normalization/one-hot levels on the first N rows (0 = whole file)");
        cmd->add_flag("--no-normalize", no_normalize, "Skip min-max normalization");
    }

    diwe::Stream load(const std::string& path) const {
        diwe::IngestionSpec spec;
        spec.path = path;
        spec.label_column = label_column;
        spec.nominal_columns = nominal_columns;
        spec.fit_prefix = fit_prefix;
        spec.normalize = !no_normalize;
        return diwe::ingest_csv(spec);
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw diwe::DataError("cannot create directory " + dir + ": " + ec.message());
}

void write_summary(const std::string& out_dir, const json& summary) {
    if (out_dir.empty()) {
        std::cout << summary.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_dir + "/summary.json");
    if (!out) throw diwe::DataError("cannot write summary: " + out_dir + "/summary.json");
    out << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
}

int run_main(const std::string& data_path, const std::string& config_path,
             const std::string& out_dir, const IngestionFlags& ingestion,
             const std::string& checkpoint_out, const std::string& resume_path) {
    diwe::DiweConfig config =
        config_path.empty() ? diwe::DiweConfig{} : diwe::load_config_file(config_path);
    const diwe::Stream stream = ingestion.load(data_path);

    diwe::Diwe model = resume_path.empty()
                           ? diwe::Diwe(config, stream.schema)
                           : [&] {
                                 std::ifstream in(resume_path, std::ios::binary);
                                 if (!in) throw diwe::DataError("cannot open checkpoint: " + resume_path);
                                 return diwe::Diwe::load(in);
                             }();
    if (!resume_path.empty()) {
        config = model.config();
        if (model.schema().n != stream.schema.n || model.schema().c != stream.schema.c)
            throw diwe::DataError("checkpoint schema does not match the data file");
    }

    // A resumed model has already consumed the first steps() instances.
    diwe::Stream remaining;
    remaining.schema = stream.schema;
    const std::size_t skip = static_cast<std::size_t>(model.steps());
    if (skip > stream.instances.size())
        throw diwe::DataError("checkpoint is ahead of the data file");
    remaining.instances.assign(stream.instances.begin() + static_cast<std::ptrdiff_t>(skip),
                               stream.instances.end());

    diwe::DiweLearner learner(std::move(model));
    diwe::PrequentialTrace trace = diwe::prequential_run(learner, remaining);
    trace.phi_grid = config.phi_grid;

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        diwe::write_trace_csv(trace, out_dir + "/trace.csv");
    }
    if (!checkpoint_out.empty()) {
        std::ofstream out(checkpoint_out, std::ios::binary);
        if (!out) throw diwe::DataError("cannot write checkpoint: " + checkpoint_out);
        learner.model().save(out);
    }

    write_summary(out_dir, json{{"command", "run"},
                                {"data", data_path},
                                {"instances", trace.total},
                                {"correct", trace.correct},
                                {"accuracy", trace.accuracy()},
                                {"resumed_at", skip},
                                {"select_every", config.select_every},
                                {"normalize", !ingestion.no_normalize},
                                {"fit_prefix", ingestion.fit_prefix},
                                {"config", json::parse(diwe::config_to_json(config))}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DiwE stream classification benchmark toolkit"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Write a synthetic stream as CSV");
    std::string gen_kind = "sea_sudden";
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    std::size_t gen_length = 0;
    double gen_noise = -1.0;
    double gen_drift = 0.001;
    generate->add_option("--kind", gen_kind,
                         "oned_drift|sea_sudden|sea_gradual|hyperplane|rbf|rbf_regional");
    generate->add_option("--seed", gen_seed, "Stream seed");
    generate->add_option("--out", gen_out, "Output CSV path")->required();
    generate->add_option("--length", gen_length, "Instance count (0 = kind default)");
    generate->add_option("--noise", gen_noise, "Label noise fraction (-1 = kind default)");
    generate->add_option("--drift", gen_drift, "Drift magnitude per step (hyperplane/rbf)");

    // run
    auto* run = app.add_subcommand("run", "Prequential DiwE run over a stream CSV");
    std::string run_data, run_config, run_out_dir, run_checkpoint, run_resume;
    IngestionFlags run_ingestion;
    run->add_option("--data", run_data, "Stream CSV")->required();
    run->add_option("--config", run_config, "DiwE config JSON");
    run->add_option("--out-dir", run_out_dir, "Directory for trace.csv + summary.json");
    run->add_option("--checkpoint-out", run_checkpoint, "Write the final model state here");
    run->add_option("--resume", run_resume, "Resume from a checkpoint file");
    run_ingestion.attach(run);

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Sliding-window kNN prequential run");
    std::string base_data, base_out_dir;
    std::size_t base_window = 1000;
    int base_k = 5;
    IngestionFlags base_ingestion;
    baseline->add_option("--data", base_data, "Stream CSV")->required();
    baseline->add_option("--window", base_window, "Window size");
    baseline->add_option("--k", base_k, "Neighbor count");
    baseline->add_option("--out-dir", base_out_dir, "Directory for trace.csv + summary.json");
    base_ingestion.attach(baseline);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Benchmark experiment runners");
    std::string exp_name, exp_out_dir, exp_config;
    int exp_runs = 10;
    std::uint64_t exp_seed = 1;
    std::size_t exp_length = 0;
    int exp_select_every = 0;
    int exp_draws = 50;
    std::vector<std::string> exp_kinds;
    experiment
        ->add_option("--name", exp_name,
                     "exp1_removal|exp2_synthetic|exp4_maxrdd_vs_random|exp5_sensitivity")
        ->required();
    experiment->add_option("--runs", exp_runs, "Seeded runs per dataset");
    experiment->add_option("--seed", exp_seed, "Base seed");
    experiment->add_option("--out-dir", exp_out_dir, "Report directory")->required();
    experiment->add_option("--length", exp_length, "Stream length (0 = generator default)");
    experiment->add_option("--config", exp_config, "DiwE config JSON");
    experiment->add_option("--select-every", exp_select_every,
                           "Override selection cadence (recorded in the report)");
    experiment->add_option("--draws", exp_draws, "Random-selection draws (exp4)");
    experiment->add_option("--kinds", exp_kinds, "Generator kinds to include")->delimiter(',');

    try {
        app.parse(argc, argv);

        if (generate->parsed()) {
            diwe::GeneratorSpec spec;
            spec.kind = diwe::generator_kind_from_name(gen_kind);
            spec.seed = gen_seed;
            spec.length = gen_length;
            spec.noise = gen_noise;
            spec.drift_per_step = gen_drift;
            const diwe::Stream stream = diwe::generate(spec);
            diwe::write_stream_csv(stream, gen_out);
            std::cout << "wrote " << stream.instances.size() << " instances (n=" << stream.schema.n
                      << ", c=" << stream.schema.c << ") to " << gen_out << "\n";
            return 0;
        }

        if (run->parsed())
            return run_main(run_data, run_config, run_out_dir, run_ingestion, run_checkpoint,
                            run_resume);

        if (baseline->parsed()) {
            const diwe::Stream stream = base_ingestion.load(base_data);
            diwe::SlidingWindowKnn learner(base_window, base_k, stream.schema);
            diwe::PrequentialTrace trace = diwe::prequential_run(learner, stream);
            if (!base_out_dir.empty()) {
                ensure_dir(base_out_dir);
                diwe::write_trace_csv(trace, base_out_dir + "/trace.csv");
            }
            write_summary(base_out_dir, json{{"command", "baseline"},
                                             {"data", base_data},
                                             {"window", base_window},
                                             {"k", base_k},
                                             {"instances", trace.total},
                                             {"correct", trace.correct},
                                             {"accuracy", trace.accuracy()}});
            return 0;
        }

        if (experiment->parsed()) {
            diwe::ExperimentOptions options;
            options.out_dir = exp_out_dir;
            options.runs = exp_runs;
            options.base_seed = exp_seed;
            options.length = exp_length;
            options.random_draws = exp_draws;
            if (!exp_config.empty()) options.config = diwe::load_config_file(exp_config);
            if (exp_select_every > 0) options.config.select_every = exp_select_every;
            if (!exp_kinds.empty()) {
                options.kinds.clear();
                for (const std::string& name : exp_kinds)
                    options.kinds.push_back(diwe::generator_kind_from_name(name));
            }
            std::cout << diwe::run_experiment(exp_name, options);
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const diwe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const diwe::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
