#include "bmc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "bmc/cli.hpp"
#include "bmc/errors.hpp"
#include "bmc/games.hpp"
#include "bmc/mismatch.hpp"
#include "bmc/parallel.hpp"
#include "bmc/simulator.hpp"

namespace bmc::verify {

namespace {

constexpr std::uint64_t kCriterionStride = std::uint64_t{1} << 32;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

BinaryChannel sample_channel(std::mt19937_64& rng, double band) {
    for (;;) {
        const double a = unit(rng), b = unit(rng);
        if (std::fabs(a + b - 1.0) >= band) return BinaryChannel(a, b);
    }
}

BinaryChannel sample_channel_in_class(std::mt19937_64& rng, ChannelClass cls, double band) {
    for (;;) {
        const BinaryChannel w = sample_channel(rng, band);
        if (class_of(w) == cls) return w;
    }
}

double h2_bits(double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

// h2 inverse on [0, 1/2]
double h2_inverse_low(double y) {
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h2_bits(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

MetricBank universal_pair(double q) {
    return MetricBank({likelihood_metric(BinaryChannel(q, q)),
                       likelihood_metric(BinaryChannel(1.0 - q, 1.0 - q))});
}

std::string fmt(const char* f, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

using Runner = std::function<void(std::uint64_t seed, unsigned workers, CriterionResult&)>;

// --- criterion bodies -------------------------------------------------

void c1_alpha(std::uint64_t /*seed*/, unsigned workers, CriterionResult& r) {
    const GameResult g = alpha_game(1025, 512, 1e-3, workers);
    const double p0 = g.witness_input.p0;
    // The infimum is attained on the Z-channel family; reversal and output
    // relabeling make all four degenerate edges exactly symmetric, so the
    // witness may surface on any of them.
    const double a = g.witness_channel.a, b = g.witness_channel.b;
    const double boundary_dist = std::min(std::min(a, 1.0 - a), std::min(b, 1.0 - b));
    const double refine_res = (1.0 / 511.0) / 100.0;
    r.pass = g.value >= 0.939 && g.value <= 0.945 && std::fabs(p0 - 0.5) <= 1e-3 &&
             boundary_dist <= refine_res * 1.05;
    r.measured = fmt("value=%.6f, p0=%.6f, worst=(%.6g,%.6g)", g.value, p0, a, b);
}

void c2_majani(std::uint64_t /*seed*/, unsigned workers, CriterionResult& r) {
    const GameResult g = uniform_efficiency_floor(512, 1e-3, workers);
    r.pass = g.value >= 0.939;
    r.measured = fmt("min_ratio=%.6f at (%.6g,%.6g)", g.value, g.witness_channel.a,
                     g.witness_channel.b);
}

void c3_dichotomy(std::uint64_t seed, unsigned workers, CriterionResult& r) {
    const std::size_t count = 10000;
    const InputDistribution u = InputDistribution::uniform();
    std::vector<double> same_dev(count, 0.0), cross_val(count, 0.0);
    std::vector<char> violation(count, 0);
    parallel_for(count, resolve_workers(workers), [&](std::size_t i) {
        std::mt19937_64 rng(seed + 3 * kCriterionStride + i);
        const BinaryChannel w0 = sample_channel(rng, 0.01);
        const BinaryChannel w1 = sample_channel(rng, 0.01);
        const MetricBank bank({likelihood_metric(w1)});
        const double v = mismatched_information(u, w0, bank).bits;
        if (class_of(w0) == class_of(w1)) {
            same_dev[i] = std::fabs(v - mutual_information(u, w0));
            if (same_dev[i] > 1e-9) violation[i] = 1;
        } else {
            cross_val[i] = v;
            if (v > 1e-9) violation[i] = 1;
        }
    });
    const double max_same = *std::max_element(same_dev.begin(), same_dev.end());
    const double max_cross = *std::max_element(cross_val.begin(), cross_val.end());
    const long violations = std::count(violation.begin(), violation.end(), 1);
    r.pass = violations == 0;
    r.measured = fmt("max same-class |dev|=%.2e, max cross-class rate=%.2e, violations=%ld",
                     max_same, max_cross, violations);
}

void c4_beta2(std::uint64_t seed, unsigned workers, CriterionResult& r) {
    std::mt19937_64 rng(seed + 4 * kCriterionStride);
    double min_ratio = std::numeric_limits<double>::infinity();
    double worst_q = 0.0;
    for (int i = 0; i < 100; ++i) {
        double q;
        do {
            q = unit(rng);
        } while (std::fabs(q - 0.5) < 1e-3); // the degenerate BSC(1/2) pair carries no information
        const GameResult g = beta_game(universal_pair(q), InputDistribution::uniform(), 256,
                                       1e-2, workers);
        if (g.value < min_ratio) {
            min_ratio = g.value;
            worst_q = q;
        }
    }
    r.pass = min_ratio >= 1.0 - 1e-6;
    r.measured = fmt("min ratio=%.9f (worst bank q=%.6f)", min_ratio, worst_q);
}

void c5_oracle(std::uint64_t seed, unsigned workers, CriterionResult& r) {
    const std::size_t count = 1000;
    const InputDistribution u = InputDistribution::uniform();
    std::vector<double> dev(count, 0.0);
    parallel_for(count, resolve_workers(workers), [&](std::size_t i) {
        std::mt19937_64 rng(seed + 5 * kCriterionStride + i);
        const BinaryChannel w0(unit(rng), unit(rng));
        const std::size_t k = 1 + static_cast<std::size_t>(rng() % 4);
        std::vector<Metric> metrics;
        for (std::size_t j = 0; j < k; ++j) {
            metrics.push_back(likelihood_metric(BinaryChannel(unit(rng), unit(rng))));
        }
        const MetricBank bank(std::move(metrics));
        const double exact = mismatched_information(u, w0, bank).bits;
        const double swept = mismatched_information_oracle(u, w0, bank, 10000000);
        dev[i] = std::fabs(exact - swept);
    });
    const double max_dev = *std::max_element(dev.begin(), dev.end());
    r.pass = max_dev <= 1e-6;
    r.measured = fmt("max |exact - oracle| = %.3e over %zu instances", max_dev, count);
}

void c6_matched(std::uint64_t seed, unsigned workers, CriterionResult& r) {
    const std::size_t count = 1000;
    const InputDistribution u = InputDistribution::uniform();
    std::vector<double> dev(count, 0.0);
    parallel_for(count, resolve_workers(workers), [&](std::size_t i) {
        std::mt19937_64 rng(seed + 6 * kCriterionStride + i);
        const BinaryChannel w0(unit(rng), unit(rng));
        const MetricBank bank({likelihood_metric(w0)});
        dev[i] = std::fabs(mismatched_information(u, w0, bank).bits - mutual_information(u, w0));
    });
    const double max_dev = *std::max_element(dev.begin(), dev.end());
    r.pass = max_dev <= 1e-9;
    r.measured = fmt("max |i_mis(matched) - I| = %.3e", max_dev);
}

void c7_compound(std::uint64_t /*seed*/, unsigned /*workers*/, CriterionResult& r) {
    const ChannelSet pair({BinaryChannel(0.89, 0.89), BinaryChannel(0.11, 0.11)});
    const GameResult g = compound_capacity(pair, 1e-9);
    const double expected = 1.0 - h2_bits(0.11);
    const double pair_dev = std::fabs(g.value - expected);
    const double p_dev = std::fabs(g.witness_input.p0 - 0.5);

    double singleton_dev = 0.0;
    for (const BinaryChannel& w :
         {BinaryChannel(0.89, 0.89), BinaryChannel(1.0, 0.5), BinaryChannel(0.3, 0.4)}) {
        const GameResult s = compound_capacity(ChannelSet({w}), 1e-12);
        singleton_dev = std::max(singleton_dev, std::fabs(s.value - capacity(w).bits));
    }
    r.pass = pair_dev <= 1e-9 && p_dev <= 1e-6 && singleton_dev <= 1e-9;
    r.measured = fmt("|C-(1-h2(0.11))|=%.2e, |p*-0.5|=%.2e, singleton dev=%.2e", pair_dev, p_dev,
                     singleton_dev);
}

void c8_capacity_achieving_bank(std::uint64_t seed, unsigned /*workers*/, CriterionResult& r) {
    std::mt19937_64 rng(seed + 8 * kCriterionStride);
    const InputDistribution u = InputDistribution::uniform();

    std::vector<BinaryChannel> channels;
    for (int i = 0; i < 9; ++i) {
        channels.push_back(sample_channel_in_class(rng, ChannelClass::Flipping, 0.01));
    }
    for (int i = 0; i < 9; ++i) {
        channels.push_back(sample_channel_in_class(rng, ChannelClass::NonFlipping, 0.01));
    }
    double i_min = std::numeric_limits<double>::infinity();
    for (const BinaryChannel& w : channels) {
        i_min = std::min(i_min, mutual_information(u, w));
    }
    // Anchor each class component with a BSC strictly below the component's
    // information floor so the per-component minimizer is unambiguous.
    const double q = h2_inverse_low(1.0 - 0.8 * i_min);
    channels.push_back(BinaryChannel(q, q));             // index 18, flipping
    channels.push_back(BinaryChannel(1.0 - q, 1.0 - q)); // index 19, non-flipping

    std::vector<std::vector<std::size_t>> parts(2);
    for (std::size_t i = 0; i < channels.size(); ++i) {
        parts[class_of(channels[i]) == ChannelClass::Flipping ? 0 : 1].push_back(i);
    }
    const ChannelSet s(channels, parts);
    const MetricBank bank = compound_metric_bank(s, u);

    double min_margin = std::numeric_limits<double>::infinity();
    for (const BinaryChannel& w : channels) {
        const double margin =
            mismatched_information(u, w, bank).bits - mutual_information(u, w);
        min_margin = std::min(min_margin, margin);
    }
    r.pass = min_margin >= -1e-6;
    r.measured = fmt("min (i_mis - I) over 20 channels = %.3e (anchor q=%.4f)", min_margin, q);
}

void c9_order_preservation(std::uint64_t seed, unsigned workers, CriterionResult& r) {
    const std::size_t count = 20;
    std::vector<char> holds(count, 0);
    parallel_for(count, resolve_workers(workers), [&](std::size_t i) {
        std::mt19937_64 rng(seed + 9 * kCriterionStride + i);
        for (;;) {
            const BinaryChannel p1(unit(rng), unit(rng));
            const BinaryChannel p2(unit(rng), unit(rng));
            if ((p1.a + p1.b - 1.0) * (p2.a + p2.b - 1.0) <= 0.0) continue;
            holds[i] = likelihood_order_check(p1, p2, 10).holds ? 1 : 0;
            return;
        }
    });
    const long ok = std::count(holds.begin(), holds.end(), 1);
    r.pass = ok == static_cast<long>(count);
    r.measured = fmt("%ld/%zu pairs order-preserving at n=10", ok, count);
}

void c10_monte_carlo(std::uint64_t seed, unsigned workers, CriterionResult& r) {
    const InputDistribution u = InputDistribution::uniform();
    std::string leg1;
    bool leg1_ok = false;
    try {
        const Codebook cb = generate_codebook(1024, 0.15, u, seed);
        const BinaryChannel w0(0.2, 0.3);
        const SimulationReport ml = estimate_error(w0, cb, MatchedMl{}, 10000, seed, workers);
        const SimulationReport gld =
            estimate_error(w0, cb, GldDecoder{universal_pair(0.89)}, 10000, seed, workers);
        const double se = std::sqrt(ml.p_e_hat * (1 - ml.p_e_hat) / 10000.0 +
                                    gld.p_e_hat * (1 - gld.p_e_hat) / 10000.0);
        leg1_ok = std::fabs(ml.p_e_hat - gld.p_e_hat) < 3.0 * se;
        leg1 = fmt("|dP|=%.4f vs 3SE=%.4f", std::fabs(ml.p_e_hat - gld.p_e_hat), 3.0 * se);
    } catch (const SizeExceeded& e) {
        leg1 = fmt("blocked (%s)", e.what());
    }

    // Feasible-scale reference run of the same A/B comparison.
    const BinaryChannel w0(0.2, 0.3);
    const Codebook small = generate_codebook(100, 0.15, u, seed);
    const SimulationReport ml_s = estimate_error(w0, small, MatchedMl{}, 10000, seed + 1, workers);
    const SimulationReport gld_s =
        estimate_error(w0, small, GldDecoder{universal_pair(0.89)}, 10000, seed + 1, workers);
    const double se_s = std::sqrt(ml_s.p_e_hat * (1 - ml_s.p_e_hat) / 10000.0 +
                                  gld_s.p_e_hat * (1 - gld_s.p_e_hat) / 10000.0);

    // Rate above capacity: R = 0.85 > C(BSC(0.89)) ~ 0.5001 bits.
    const Codebook cap_cb = generate_codebook(23, 0.85, u, seed + 2);
    const SimulationReport above =
        estimate_error(BinaryChannel(0.89, 0.89), cap_cb, MatchedMl{}, 10000, seed + 3, workers);
    const bool leg2_ok = above.p_e_hat >= 0.5;

    r.pass = leg1_ok && leg2_ok;
    r.measured = fmt("leg1(n=1024): %s; reference n=100: |dP|=%.4f vs 3SE=%.4f; "
                     "above-capacity n=23: p_e=%.3f",
                     leg1.c_str(), std::fabs(ml_s.p_e_hat - gld_s.p_e_hat), 3.0 * se_s,
                     above.p_e_hat);
}

void c11_determinism(std::uint64_t seed, unsigned /*workers*/, CriterionResult& r) {
    const std::string universal =
        R"([{"a":0.89,"b":0.89},{"a":0.11,"b":0.11}])";
    std::vector<RunConfig> configs;
    configs.push_back({"capacity", {{"a", "0.89"}, {"b", "0.89"}}, "", "json"});
    configs.push_back({"imis",
                       {{"a", "0.9"}, {"b", "0.8"}, {"p0", "0.5"}, {"bank", universal}},
                       "",
                       "json"});
    configs.push_back({"alpha",
                       {{"p_grid", "101"}, {"channel_grid", "128"}, {"delta", "0.001"}},
                       "",
                       "json"});
    configs.push_back({"beta",
                       {{"channel_grid", "128"}, {"delta", "0.01"}, {"bank", universal}},
                       "",
                       "json"});
    configs.push_back({"compound", {{"channels", universal}}, "", "json"});
    configs.push_back({"simulate",
                       {{"n", "64"}, {"rate", "0.1"}, {"a", "0.2"}, {"b", "0.3"},
                        {"decoder", "gld"}, {"bank", universal}, {"trials", "2000"},
                        {"seed", std::to_string(seed)}},
                       "",
                       "json"});
    int identical = 0;
    for (const RunConfig& cfg : configs) {
        const std::string one = run_core(cfg, 1).dump();
        const std::string two = run_core(cfg, 2).dump();
        const std::string four = run_core(cfg, 4).dump();
        if (one == two && two == four) ++identical;
    }
    r.pass = identical == static_cast<int>(configs.size());
    r.measured = fmt("%d/%zu configs byte-identical across 1/2/4 workers", identical,
                     configs.size());
}

struct Criterion {
    int id;
    const char* name;
    const char* target;
    Runner run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> table = {
        {1, "alpha game", "value in [0.939,0.945], p0=0.5+/-1e-3, Z-boundary witness", c1_alpha},
        {2, "uniform-input floor", "min I(U,W)/C(W) >= 0.939 on 512x512 grid", c2_majani},
        {3, "class dichotomy", "10^4 pairs: same class exact, cross class zero (1e-9)",
         c3_dichotomy},
        {4, "two-metric universality", "min i_mis/I >= 1-1e-6 for 100 BSC banks", c4_beta2},
        {5, "oracle equivalence", "|exact - 10^7-point sweep| <= 1e-6 on 10^3 instances",
         c5_oracle},
        {6, "matched-metric sanity", "i_mis(U,W,{log W}) = I(U,W) within 1e-9", c6_matched},
        {7, "compound capacity", "C{BSC .89,.11} = 1-h2(0.11), uniform P*, singletons",
         c7_compound},
        {8, "capacity-achieving bank", "i_mis >= I - 1e-6 on 20 two-class channels",
         c8_capacity_achieving_bank},
        {9, "order preservation", "20 positive-det pairs exhaustive at n=10",
         c9_order_preservation},
        {10, "decoder equivalence MC", "ML vs GLD within 3SE at n=1024; p_e >= 0.5 above capacity",
         c10_monte_carlo},
        {11, "determinism", "byte-identical JSON across worker counts", c11_determinism},
    };
    return table;
}

} // namespace

int criterion_count() { return static_cast<int>(criteria().size()); }

std::vector<CriterionResult> run_criteria(std::uint64_t seed, unsigned workers, int only) {
    std::vector<CriterionResult> out;
    for (const Criterion& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        CriterionResult r;
        r.id = c.id;
        r.name = c.name;
        r.target = c.target;
        const auto t0 = std::chrono::steady_clock::now();
        c.run(seed, workers, r);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    if (out.empty()) {
        throw ConfigError("criterion selector must name one of 1.." +
                          std::to_string(criterion_count()));
    }
    return out;
}

} // namespace bmc::verify
