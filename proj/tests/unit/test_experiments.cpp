#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "diwe/experiments.hpp"
#include "diwe/prequential.hpp"

using namespace diwe;
using nlohmann::json;

namespace {

DiweConfig small_config() {
    DiweConfig config;
    config.phi_grid = {0.1, 0.2, 0.3, 0.4, 0.5};
    config.voting_size = 3;
    config.max_buffer = 100;
    return config;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("parallel_for runs every job exactly once and propagates errors") {
    std::vector<std::atomic<int>> hits(64);
    parallel_for(64, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(8, 2,
                                 [&](std::size_t i) {
                                     if (i == 5) throw DataError("boom");
                                 }),
                    DataError);
}

TEST_CASE("summarize") {
    const RunStat stat = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(stat.mean == doctest::Approx(2.5));
    CHECK(stat.sd == doctest::Approx(1.2909944487));
    CHECK(summarize({7.0}).sd == 0.0);
}

TEST_CASE("exp1 buffer trace shape") {
    const auto sizes = exp1_buffer_trace(1);
    REQUIRE(sizes.size() == 4000);
    CHECK(sizes[0] == 1);
    for (std::size_t t = 1; t < sizes.size(); ++t) CHECK(sizes[t] <= 1000);
    // radii stay unbounded until min_training_size(0.1)=100 cores exist, so
    // nothing can be removed before then and the buffer equals t exactly
    CHECK(sizes[99] == 100);
    // earliest possible removal is 44 consecutive misses later
    CHECK(sizes[142] == 143);
    CHECK(sizes[3999] > 200);
}

TEST_CASE("experiment runners write parseable reports") {
    const std::string dir = "/tmp/diwe_test_exp";
    std::filesystem::remove_all(dir);

    ExperimentOptions opt;
    opt.out_dir = dir;
    opt.runs = 2;
    opt.length = 300;
    opt.config = small_config();
    opt.threads = 2;
    opt.kinds = {GeneratorKind::sea_sudden, GeneratorKind::rbf};

    SUBCASE("exp2") {
        const json report = json::parse(run_experiment("exp2_synthetic", opt));
        CHECK(report["experiment"] == "exp2_synthetic");
        REQUIRE(report["datasets"].size() == 2);
        for (const auto& row : report["datasets"]) {
            CHECK(row["runs"] == 2);
            const double mean = row["accuracy_mean"];
            CHECK(mean > 0.0);
            CHECK(mean <= 1.0);
        }
        CHECK(read_json(dir + "/summary.json") == report);
    }

    SUBCASE("exp1") {
        const json report = json::parse(run_experiment("exp1_removal", opt));
        REQUIRE(report["runs"].size() == 2);
        for (const auto& row : report["runs"]) {
            CHECK(row["buf_t2400"].get<std::size_t>() > 0);
            CHECK(row["buf_t4000"].get<std::size_t>() > 0);
        }
        CHECK(std::filesystem::exists(dir + "/exp1_seed1.csv"));
        CHECK(std::filesystem::exists(dir + "/exp1_seed2.csv"));
    }

    SUBCASE("exp4") {
        opt.runs = 1;
        opt.random_draws = 3;
        opt.kinds = {GeneratorKind::sea_sudden};
        const json report = json::parse(run_experiment("exp4_maxrdd_vs_random", opt));
        REQUIRE(report["streams"].size() == 1);
        CHECK(report["streams"][0]["random_sd"].get<double>() >= 0.0);
        CHECK(report.contains("mean_gap"));
    }

    SUBCASE("exp5") {
        opt.voting_sizes = {2, 4};
        opt.buffer_sizes = {50};
        opt.kinds = {GeneratorKind::sea_sudden};
        const json report = json::parse(run_experiment("exp5_sensitivity", opt));
        // two voting points plus one buffer point
        REQUIRE(report["sweep"].size() == 3);
        CHECK(report["sweep"][0]["voting_size"] == 2);
        CHECK(report["sweep"][1]["voting_size"] == 4);
        CHECK(report["sweep"][2]["max_buffer"] == 50);
    }

    SUBCASE("unknown name") {
        CHECK_THROWS_AS(run_experiment("exp3_nonexistent", opt), ConfigError);
    }

    std::filesystem::remove_all(dir);
}

TEST_CASE("exp5 sensitivity: voting size 10 holds within a point of 5 on SEA") {
    // full-length check of the sweep's headline relation, 2 seeds
    std::vector<double> acc10(2), acc5(2);
    parallel_for(4, 2, [&](std::size_t job) {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::sea_sudden;
        spec.seed = 1 + job % 2;
        DiweConfig config;
        config.voting_size = job < 2 ? 10 : 5;
        const double acc = diwe_accuracy(generate(spec), config);
        (job < 2 ? acc10 : acc5)[job % 2] = acc;
    });
    const double mean10 = (acc10[0] + acc10[1]) / 2.0;
    const double mean5 = (acc5[0] + acc5[1]) / 2.0;
    CHECK(mean10 >= mean5 - 0.01);
}
