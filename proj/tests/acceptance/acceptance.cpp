// Acceptance suite: one criterion per invocation (argv[1] = 1..11) or all
// criteria when run bare. Prints one [PASS]/[FAIL] line per criterion and
// exits nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "diwe/diversity.hpp"
#include "diwe/ensemble.hpp"
#include "diwe/experiments.hpp"
#include "diwe/generators.hpp"
#include "diwe/prequential.hpp"
#include "diwe/region_set.hpp"
#include "diwe/detail/kernels.hpp"
#include "diwe/rng.hpp"

using namespace diwe;
using nlohmann::json;

namespace {

bool approx(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

LabeledInstance inst_at(std::vector<double> features, std::uint64_t t, int label = 0) {
    return {std::move(features), label, t};
}

// ---------------------------------------------------------------- criterion 1

// Never-hit region under phi=0.1, alpha=0.01: survives exactly 43 decay
// steps, removed on step 44.
bool criterion1(std::string& detail) {
    if (drift_horizon(0.1, 0.01) != 44) {
        detail = "drift_horizon(0.1,0.01) != 44";
        return false;
    }

    Rng rng(2024);
    std::vector<LabeledInstance> training;
    for (std::uint64_t t = 1; t <= 99; ++t)
        training.push_back(inst_at({rng.uniform(), rng.uniform()}, t));
    training.push_back(inst_at({50.0, 50.0}, 100));  // tracked region, radius ~70
    RegionSet rs = RegionSet::initialize(0.1, training, 1000000);

    const auto tracked_present = [&] {
        const auto ids = rs.arrivals();
        return std::find(ids.begin(), ids.end(), 100u) != ids.end();
    };
    std::uint64_t t = 101;
    for (int step = 1; step <= 43; ++step) {
        rs.observe(inst_at({800.0 + rng.uniform(), 800.0}, t++), 0.01);
        if (!tracked_present()) {
            detail = "removed early, on decay step " + std::to_string(step);
            return false;
        }
    }
    rs.observe(inst_at({800.0 + rng.uniform(), 800.0}, t++), 0.01);
    if (tracked_present()) {
        detail = "still stored after decay step 44";
        return false;
    }
    detail = "survives 43 misses, removed on miss 44";
    return true;
}

// ---------------------------------------------------------------- criterion 2

bool criterion2(std::string& detail) {
    const std::vector<PredictionVector> vectors{{{0.6, 0.4}}, {{0.7, 0.3}}, {{0.1, 0.9}}};
    const VoteResult soft = soft_majority_vote(vectors);
    if (!approx(soft.combined[0], 1.4) || !approx(soft.combined[1], 1.6) || soft.label != 1) {
        detail = "soft vote gave {" + std::to_string(soft.combined[0]) + "," +
                 std::to_string(soft.combined[1]) + "} label " + std::to_string(soft.label);
        return false;
    }
    // hard-vote oracle: count argmax votes per class
    std::vector<int> counts(2, 0);
    for (const auto& v : vectors) counts[v.probs[1] > v.probs[0] ? 1 : 0]++;
    const int hard_label = counts[0] >= counts[1] ? 0 : 1;
    if (counts != std::vector<int>{2, 1} || hard_label != 0) {
        detail = "hard-vote oracle disagrees";
        return false;
    }
    detail = "soft {1.4,1.6}->class 2, hard {2,1}->class 1";
    return true;
}

// ---------------------------------------------------------------- criterion 3

bool criterion3(std::string& detail) {
    const std::size_t got = min_training_size(0.2);
    detail = "min_training_size(0.2) = " + std::to_string(got);
    return got == 50;
}

// ---------------------------------------------------------------- criterion 4

RegionSet set_with_arrivals(const std::vector<std::uint64_t>& ids) {
    std::vector<LabeledInstance> training;
    for (std::uint64_t id : ids) training.push_back(inst_at({0.0}, id));
    return RegionSet::initialize(0.5, training, 1000000);
}

void naive_descend(const RegionSetFamily& family, int voting, int first, std::vector<int>& cur,
                   double sum, std::vector<int>& best, double& best_sum) {
    if (static_cast<int>(cur.size()) == voting) {
        if (sum > best_sum) {
            best_sum = sum;
            best = cur;
        }
        return;
    }
    const int n = static_cast<int>(family.size());
    for (int e = first; e <= n - (voting - static_cast<int>(cur.size())); ++e) {
        double next = sum;
        for (int s : cur)
            next += rdd(family.members[static_cast<std::size_t>(s)],
                        family.members[static_cast<std::size_t>(e)]);
        cur.push_back(e);
        naive_descend(family, voting, e + 1, cur, next, best, best_sum);
        cur.pop_back();
    }
}

bool criterion4(std::string& detail) {
    Rng rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t members = 3 + rng.uniform_int(6);  // up to 8
        RegionSetFamily family;
        for (std::size_t m = 0; m < members; ++m) {
            std::vector<std::uint64_t> ids;
            for (std::uint64_t id = 1; id <= 24; ++id)
                if (rng.bernoulli(0.5)) ids.push_back(id);
            if (ids.empty()) ids.push_back(1);
            family.members.push_back(set_with_arrivals(ids));
        }
        const int voting =
            static_cast<int>(2 + rng.uniform_int(std::min<std::uint64_t>(3, members - 1)));

        const EnsembleSelection fast = max_rdd_select(family, voting);
        std::vector<int> cur, best;
        double best_sum = -1.0;
        naive_descend(family, voting, 0, cur, 0.0, best, best_sum);
        const double naive_diversity =
            (2.0 * best_sum) / static_cast<double>(voting * (voting - 1));

        if (fast.indices != best || fast.diversity != naive_diversity) {
            detail = "trial " + std::to_string(trial) + ": selection or value mismatch";
            return false;
        }
    }
    detail = "200 random families, bit-exact selection and value";
    return true;
}

// ---------------------------------------------------------------- criterion 5

bool criterion5(std::string& detail) {
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double phi = 0.025 * i;
        double cdf_zero = 1.0;  // brute-force product form of B(tau, phi) at 0
        for (unsigned tau = 0; tau <= 500; ++tau) {
            const double got = zero_hit_probability(phi, tau);
            const double rel = std::abs(got - cdf_zero) / cdf_zero;
            worst = std::max(worst, rel);
            if (rel >= 1e-12) {
                detail = "phi=" + std::to_string(phi) + " tau=" + std::to_string(tau) +
                         " rel err " + std::to_string(rel);
                return false;
            }
            cdf_zero *= 1.0 - phi;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max rel err %.2e over grid x tau<=500", worst);
    detail = buf;
    return true;
}

// ---------------------------------------------------------------- criterion 6

bool criterion6(std::string& detail) {
    // Single phi=0.1 member, w_max=300: the cap sits well under the mean
    // region lifetime (1/alpha - 1)/phi ~ 990, so the buffer saturates it
    // between drifts and the dip/recovery pattern is well defined. The
    // buffer level at t is the sawtooth's trailing 150-step mean; each
    // window lies inside one concept segment.
    const int runs = 50;
    const std::size_t window = 150;
    auto level = [&](const std::vector<std::size_t>& sizes, std::size_t t) {
        double sum = 0.0;
        for (std::size_t i = t - window; i < t; ++i) sum += static_cast<double>(sizes[i]);
        return sum / static_cast<double>(window);
    };
    std::vector<int> ok(runs, 0);
    parallel_for(static_cast<std::size_t>(runs), 2, [&](std::size_t i) {
        const auto sizes = exp1_buffer_trace(1 + static_cast<std::uint64_t>(i), 0.1, 0.01, 300);
        const double at2400 = level(sizes, 2400);
        const double at2750 = level(sizes, 2750);
        const double at4000 = level(sizes, 4000);
        ok[i] = (at2750 < at2400 && std::abs(at4000 - at2400) <= 0.10 * at2400) ? 1 : 0;
    });
    const int passed = std::accumulate(ok.begin(), ok.end(), 0);
    detail = std::to_string(passed) +
             "/50 seeds dip at t=2750 and recover within 10% by t=4000 (w_max=300)";
    return passed >= 45;
}

// ---------------------------------------------------------------- criterion 7

double timed_diwe_accuracy(const Stream& stream, const DiweConfig& config, double* minutes) {
    const auto begin = std::chrono::steady_clock::now();
    const double acc = diwe_accuracy(stream, config);
    const auto end = std::chrono::steady_clock::now();
    if (minutes) *minutes = std::chrono::duration<double>(end - begin).count() / 60.0;
    return acc;
}

bool criterion7(std::string& detail) {
    const DiweConfig config;  // defaults, select_every = 1
    std::vector<double> sea(10), rbfr(10);
    std::vector<double> wall(20, 0.0);
    parallel_for(20, 2, [&](std::size_t job) {
        GeneratorSpec spec;
        spec.kind = job < 10 ? GeneratorKind::sea_sudden : GeneratorKind::rbf_regional;
        spec.seed = 1 + job % 10;
        const Stream stream = generate(spec);
        double minutes = 0.0;
        const double acc = timed_diwe_accuracy(stream, config, &minutes);
        wall[job] = minutes;
        (job < 10 ? sea : rbfr)[job % 10] = acc;
    });

    const RunStat sea_stat = summarize(sea);
    const RunStat rbfr_stat = summarize(rbfr);
    const double slowest = *std::max_element(wall.begin(), wall.end());
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "SEAs %.2f%%+-%.2f (band 85.5-92.0), RBFr %.2f%%+-%.2f (band 88.0-95.0), "
                  "slowest run %.1f min, select_every=1",
                  100.0 * sea_stat.mean, 100.0 * sea_stat.sd, 100.0 * rbfr_stat.mean,
                  100.0 * rbfr_stat.sd, slowest);
    detail = buf;
    const bool sea_ok = sea_stat.mean >= 0.855 && sea_stat.mean <= 0.920;
    const bool rbfr_ok = rbfr_stat.mean >= 0.880 && rbfr_stat.mean <= 0.950;
    return sea_ok && rbfr_ok && slowest < 10.0;
}

// ---------------------------------------------------------------- criterion 8

bool criterion8(std::string& detail) {
    int wins = 0;
    std::vector<int> win(10, 0);
    parallel_for(10, 2, [&](std::size_t i) {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::sea_sudden;
        spec.seed = 1 + i;
        const Stream stream = generate(spec);
        const double diwe = diwe_accuracy(stream, DiweConfig{});
        const double knn = baseline_accuracy(stream, 1000, 5);
        win[i] = diwe > knn ? 1 : 0;
    });
    wins = std::accumulate(win.begin(), win.end(), 0);
    detail = "DiwE beats sliding-window kNN(1000,5) on " + std::to_string(wins) +
             "/10 paired SEA streams";
    return wins >= 8;
}

// ---------------------------------------------------------------- criterion 9

bool criterion9(std::string& detail) {
    ExperimentOptions opt;
    opt.runs = 2;  // 5 kinds x 2 seeds = 10 streams
    opt.length = 1500;
    opt.config.max_buffer = 500;
    opt.random_draws = 50;
    opt.threads = 2;
    const json report = json::parse(run_experiment("exp4_maxrdd_vs_random", opt));
    const double max_rdd = report["max_rdd_mean"];
    const double random = report["random_mean"];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "Max-RDD mean %.4f vs random mean %.4f (gap %+.4f)",
                  max_rdd, random, max_rdd - random);
    detail = buf;
    return max_rdd >= random;
}

// --------------------------------------------------------------- criterion 10

bool criterion10(std::string& detail) {
    Rng rng(31337);

    // weight-decay law + removal exactly at the horizon
    for (double phi : {0.05, 0.2, 0.5}) {
        const int horizon = drift_horizon(phi, 0.01);
        std::vector<LabeledInstance> training;
        const std::size_t m = std::max<std::size_t>(min_training_size(phi), 25);
        for (std::uint64_t t = 1; t < m; ++t)
            training.push_back(inst_at({rng.uniform(), rng.uniform()}, t));
        training.push_back(inst_at({50.0, 50.0}, m));
        RegionSet rs = RegionSet::initialize(phi, training, 1000000);
        std::uint64_t t = m + 1;
        for (int step = 1; step <= horizon; ++step) {
            rs.observe(inst_at({900.0 + rng.uniform(), 900.0}, t++), 0.01);
            const auto ids = rs.arrivals();
            const bool present = std::find(ids.begin(), ids.end(), m) != ids.end();
            if (step < horizon) {
                if (!present) {
                    detail = "decay law: early removal";
                    return false;
                }
                const std::size_t idx = static_cast<std::size_t>(
                    std::find(ids.begin(), ids.end(), m) - ids.begin());
                const double expect = zero_hit_probability(phi, static_cast<unsigned>(step));
                if (std::abs(rs.weights()[idx] - expect) > 1e-12 * expect) {
                    detail = "decay law: weight drifted beyond ulp accumulation";
                    return false;
                }
            } else if (present) {
                detail = "decay law: survived past the horizon";
                return false;
            }
        }
    }

    // buffer bound under churn
    {
        RegionSet rs(0.3, 40);
        for (std::uint64_t t = 1; t <= 600; ++t) {
            rs.observe(inst_at({rng.uniform(), rng.uniform()}, t), 0.01);
            if (rs.size() > 40) {
                detail = "buffer bound violated";
                return false;
            }
        }
    }

    // RDD bounds and symmetry on random families
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::uint64_t> a_ids, b_ids;
        for (std::uint64_t id = 1; id <= 30; ++id) {
            if (rng.bernoulli(0.5)) a_ids.push_back(id);
            if (rng.bernoulli(0.5)) b_ids.push_back(id);
        }
        const RegionSet a = set_with_arrivals(a_ids.empty() ? std::vector<std::uint64_t>{1} : a_ids);
        const RegionSet b = set_with_arrivals(b_ids.empty() ? std::vector<std::uint64_t>{2} : b_ids);
        const double ab = rdd(a, b);
        if (ab < 0.0 || ab > 1.0 || ab != rdd(b, a) || rdd(a, a) != 0.0) {
            detail = "rdd bounds/symmetry violated";
            return false;
        }
    }

    // prediction vector normalization + determinism + test-then-train
    {
        DiweConfig config;
        config.max_buffer = 120;
        Diwe a(config, StreamSchema{2, 3, {}});
        Diwe b(config, StreamSchema{2, 3, {}});
        Rng data(999);
        for (std::uint64_t t = 1; t <= 400; ++t) {
            const LabeledInstance inst = inst_at({data.uniform(), data.uniform()}, t,
                                                 static_cast<int>(data.uniform_int(3)));
            const auto ra = a.step(inst);
            const auto rb = b.step(inst);
            const double total =
                std::accumulate(ra.probs.probs.begin(), ra.probs.probs.end(), 0.0);
            if (std::abs(total - 1.0) > 1e-9) {
                detail = "prediction vector not normalized";
                return false;
            }
            if (ra.predicted != rb.predicted || !(ra.probs == rb.probs)) {
                detail = "determinism violated";
                return false;
            }
        }
        // label scrambling at prediction time must not move the prediction
        Diwe with_true = a;
        Diwe scrambled = a;
        const std::vector<double> q{data.uniform(), data.uniform()};
        const auto r1 = with_true.step(inst_at(q, 401, 0));
        const auto r2 = scrambled.step(inst_at(q, 401, 2));
        if (r1.predicted != r2.predicted || !(r1.probs == r2.probs)) {
            detail = "current label leaked into the prediction";
            return false;
        }
    }

    detail = "decay law, buffer bound, RDD bounds, normalization, determinism, test-then-train";
    return true;
}

// --------------------------------------------------------------- criterion 11

bool criterion11(std::string& detail) {
    // 20k stationary instances, measured once every region set has settled
    // at its equilibrium size: 500-instance training init plus an unmeasured
    // 4000-step prefix (the slowest sets need a few mean lifetimes to shed
    // down to equilibrium). Fixed w_max and cadence. Per-step times -> 100
    // bin means -> OLS slope t-test at 95%.
    GeneratorSpec spec;
    spec.kind = GeneratorKind::hyperplane;
    spec.seed = 99;
    spec.length = 24500;
    spec.noise = 0.10;
    spec.drift_per_step = 0.0;
    const Stream stream = generate(spec);

    DiweConfig config;
    config.max_buffer = 500;
    config.select_every = 20;
    Diwe model(config, stream.schema,
               std::span<const LabeledInstance>(stream.instances.data(), 500));

    // Fixed-work reference kernel shaped like the hot loop (distance rows +
    // selection over a 500-core matrix), timed inside every bin. Machine-
    // wide speed drift (frequency scaling, co-tenant load) moves step times
    // and the kernel together, so the per-bin ratio isolates the
    // algorithm's own trend.
    std::vector<double> ref_matrix(500 * 10);
    {
        Rng rng(4242);
        for (double& v : ref_matrix) v = rng.uniform();
    }
    std::vector<double> ref_row(500);
    auto reference_us = [&] {
        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const auto begin = std::chrono::steady_clock::now();
            double acc = 0.0;
            for (int pass = 0; pass < 20; ++pass) {
                detail::row_sq_distances(ref_matrix.data() + 10 * pass, ref_matrix.data(), 500,
                                         10, ref_row.data());
                std::nth_element(ref_row.begin(), ref_row.begin() + 49, ref_row.end());
                acc += ref_row[49];
            }
            const auto end = std::chrono::steady_clock::now();
            volatile double sink = acc;
            (void)sink;
            best = std::min(best,
                            std::chrono::duration<double, std::micro>(end - begin).count());
        }
        return best;
    };

    // Bins of 2000 steps: longer than the buffer's extinction-cycle
    // correlation length, so bin means are effectively independent and the
    // OLS t-test is calibrated. 95% two-sided quantile of t(df=8).
    const std::size_t warmup = 4500;  // the first 500 instances were the training init
    const std::size_t bins = 10;
    const std::size_t per_bin = (stream.instances.size() - warmup) / bins;
    const double t_critical = 2.306;

    std::vector<double> x(bins), y(bins), ref(bins, 0.0);
    double bin_sum = 0.0;
    std::size_t in_bin = 0, bin = 0;
    for (std::size_t i = 500; i < stream.instances.size(); ++i) {
        const auto begin = std::chrono::steady_clock::now();
        model.step(stream.instances[i]);
        const auto end = std::chrono::steady_clock::now();
        if (i < warmup) continue;
        if (in_bin == 0 && bin < bins) ref[bin] = reference_us();  // sample at bin start
        bin_sum += std::chrono::duration<double, std::micro>(end - begin).count();
        if (++in_bin == per_bin && bin < bins) {
            ref[bin] = 0.5 * (ref[bin] + reference_us());  // and at bin end
            x[bin] = static_cast<double>(bin) + 0.5;
            y[bin] = bin_sum / static_cast<double>(per_bin) / ref[bin];
            bin_sum = 0.0;
            in_bin = 0;
            ++bin;
        }
    }

    // OLS slope and its standard error
    const double n = static_cast<double>(bins);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        sxx += (x[b] - mx) * (x[b] - mx);
        sxy += (x[b] - mx) * (y[b] - my);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double resid = y[b] - my - slope * (x[b] - mx);
        sse += resid * resid;
    }
    const double se = std::sqrt(sse / (n - 2.0) / sxx);
    const double tstat = slope / se;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "mean step %.1f reference units, slope %.2e/bin (t=%.2f, |t|<%.3f accepted)",
                  my, slope, tstat, t_critical);
    detail = buf;
    return std::abs(tstat) < t_critical;
}

// --------------------------------------------------------------------- driver

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "drift-horizon identity", criterion1},
        {2, "soft-vote worked example", criterion2},
        {3, "min-sample rule", criterion3},
        {4, "Max-RDD oracle equivalence", criterion4},
        {5, "binomial zero-hit oracle", criterion5},
        {6, "buffer dip and recovery on the 1-D drift stream", criterion6},
        {7, "desk-scale accuracy bands (SEAs, RBFr)", criterion7},
        {8, "baseline dominance over sliding-window kNN", criterion8},
        {9, "Max-RDD vs random selection", criterion9},
        {10, "invariant suite", criterion10},
        {11, "complexity smoke (no superlinear step-time trend)", criterion11},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    bool all_ok = true;
    for (const Criterion& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] C%d %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
