#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bmc/errors.hpp"
#include "bmc/simulator.hpp"
#include "test_helpers.hpp"

using namespace bmc;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const InputDistribution kU = InputDistribution::uniform();

MetricBank universal_pair(double q) {
    return MetricBank({likelihood_metric(BinaryChannel(q, q)),
                       likelihood_metric(BinaryChannel(1.0 - q, 1.0 - q))});
}

BinaryWord word_from_bits(std::initializer_list<int> bits) {
    BinaryWord w(static_cast<int>(bits.size()));
    int i = 0;
    for (int b : bits) w.set_bit(i++, b);
    return w;
}

BinaryWord complement(const BinaryWord& x) {
    BinaryWord y(x.n);
    for (int i = 0; i < x.n; ++i) y.set_bit(i, 1 - x.bit(i));
    return y;
}

// Test-side oracle: per-symbol additive score with explicit -infinity
// handling, no joint-count shortcut.
double symbol_sum_score(const Metric& d, const BinaryWord& x, const BinaryWord& y) {
    double s = 0.0;
    for (int i = 0; i < x.n; ++i) {
        const double v = d(x.bit(i), y.bit(i));
        if (v == kNegInf) return kNegInf;
        s += v;
    }
    return s;
}

// Test-side exact ML comparer for channels with dyadic transition
// probabilities: likelihood products are compared as exact integers.
using BigInt = boost::multiprecision::cpp_int;

struct ExactMl {
    BigInt num[2][2]; // numerator of W(y|x) scaled by 2^shift
    int shift;

    ExactMl(const BinaryChannel& w, int shift_bits) : shift(shift_bits) {
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                const double p = w(y, x);
                const double scaled = std::ldexp(p, shift);
                REQUIRE(scaled == std::floor(scaled)); // dyadic by construction
                num[x][y] = static_cast<std::uint64_t>(scaled);
            }
        }
    }

    BigInt likelihood(const BinaryWord& x, const BinaryWord& y) const {
        BigInt l = 1;
        for (int i = 0; i < x.n; ++i) l *= num[x.bit(i)][y.bit(i)];
        return l;
    }

    std::size_t argmax(const Codebook& cb, const BinaryWord& y) const {
        std::size_t best = 0;
        BigInt best_l = likelihood(cb.codeword(0), y);
        for (std::size_t m = 1; m < cb.num_messages; ++m) {
            BigInt l = likelihood(cb.codeword(m), y);
            if (l > best_l) {
                best = m;
                best_l = l;
            }
        }
        return best;
    }
};

} // namespace

TEST_CASE("codebook generation") {
    SUBCASE("message count is 2^ceil(n rate)") {
        const Codebook cb = generate_codebook(4, 0.5, kU, 9);
        CHECK(cb.num_messages == 4);
        CHECK(cb.n == 4);
        for (std::size_t m = 0; m < 4; ++m) CHECK(cb.codeword(m).n == 4);
    }
    SUBCASE("fixed composition pins every weight") {
        const Codebook cb = generate_codebook(10, 0.3, kU, 5, true);
        for (std::size_t m = 0; m < cb.num_messages; ++m) {
            CHECK(cb.codeword(m).weight() == 5);
            CHECK(cb.weights[m] == 5);
        }
    }
    SUBCASE("same seed reproduces the codebook") {
        const Codebook a = generate_codebook(64, 0.1, InputDistribution(0.3), 123);
        const Codebook b = generate_codebook(64, 0.1, InputDistribution(0.3), 123);
        CHECK(a.storage == b.storage);
        const Codebook c = generate_codebook(64, 0.1, InputDistribution(0.3), 124);
        CHECK(a.storage != c.storage);
    }
    SUBCASE("size caps") {
        CHECK_THROWS_AS(generate_codebook(1024, 0.15, kU, 1), SizeExceeded);
        CHECK_THROWS_AS(generate_codebook(8192, 0.001, kU, 1), SizeExceeded);
        CHECK_THROWS_AS(generate_codebook(16, 0.0, kU, 1), SizeExceeded);
        CHECK_NOTHROW(generate_codebook(100, 0.2, kU, 1)); // 2^20, at the cap
    }
    SUBCASE("rate quantization never rounds an integer product up") {
        const Codebook cb = generate_codebook(10, 0.3, kU, 7); // 10*0.3 = 3 bits
        CHECK(cb.num_messages == 8);
    }
}

TEST_CASE("transmit") {
    SUBCASE("noiseless channel is the identity") {
        const BinaryWord x = word_from_bits({1, 0, 1, 1, 0, 0, 1, 0});
        CHECK(transmit(BinaryChannel(1.0, 1.0), x, 42) == x);
    }
    SUBCASE("perfect flipper complements") {
        const BinaryWord x = word_from_bits({1, 0, 1, 1, 0, 0, 1, 0});
        CHECK(transmit(BinaryChannel(0.0, 0.0), x, 42) == complement(x));
    }
    SUBCASE("empirical flip rate of a BSC matches its crossover") {
        const BinaryChannel w(0.89, 0.89);
        const BinaryWord zeros(4000);
        std::uint64_t flips = 0;
        for (int rep = 0; rep < 250; ++rep) {
            flips += transmit(w, zeros, 1000 + rep).weight();
        }
        const double rate = static_cast<double>(flips) / 1e6;
        CHECK(std::fabs(rate - 0.11) <= 0.001);
    }
    SUBCASE("deterministic given the seed") {
        const BinaryWord x = word_from_bits({1, 1, 0, 0, 1, 0, 1, 1});
        CHECK(transmit(BinaryChannel(0.7, 0.6), x, 9) == transmit(BinaryChannel(0.7, 0.6), x, 9));
    }
}

TEST_CASE("generalized linear decoding") {
    SUBCASE("matched bank on a noiseless channel always returns the sent index") {
        const Codebook cb = generate_codebook(16, 0.125, kU, 3);
        REQUIRE(cb.num_messages == 4);
        for (std::size_t m = 0; m < 4; ++m) {
            for (std::size_t j = 0; j < m; ++j) REQUIRE(cb.codeword(m) != cb.codeword(j));
        }
        const MetricBank matched({likelihood_metric(BinaryChannel(1.0, 1.0))});
        for (std::size_t m = 0; m < 4; ++m) {
            CHECK(decode_gld(matched, cb, cb.codeword(m)) == m);
        }
    }
    SUBCASE("joint-count scores equal per-symbol sums (exact integer metrics)") {
        std::mt19937_64 rng(17);
        const Codebook cb = generate_codebook(24, 0.2, kU, 29);
        const MetricBank bank(
            {Metric({{{3.0, -2.0}, {kNegInf, 5.0}}}), Metric({{{0.0, 1.0}, {4.0, -7.0}}})});
        for (int rep = 0; rep < 100; ++rep) {
            BinaryWord y(24);
            for (int i = 0; i < 24; ++i) y.set_bit(i, rng() & 1);
            // independent per-symbol argmax; integer scores make both
            // paths exact, so the equivalence is sharp
            std::size_t best = 0;
            double best_s = kNegInf;
            bool have = false;
            for (std::size_t m = 0; m < cb.num_messages; ++m) {
                double s = kNegInf;
                for (const Metric& d : bank.metrics) {
                    s = std::max(s, symbol_sum_score(d, cb.codeword(m), y));
                }
                if (!have || s > best_s) {
                    best = m;
                    best_s = s;
                    have = true;
                }
            }
            CHECK(decode_gld(bank, cb, y) == best);
        }
    }
    SUBCASE("joint-count scores track per-symbol sums for log metrics") {
        std::mt19937_64 rng(18);
        const Codebook cb = generate_codebook(24, 0.2, kU, 29);
        const MetricBank bank({likelihood_metric(BinaryChannel(1.0, 0.6)),
                               likelihood_metric(BinaryChannel(0.2, 0.3))});
        for (int rep = 0; rep < 100; ++rep) {
            BinaryWord y(24);
            for (int i = 0; i < 24; ++i) y.set_bit(i, rng() & 1);
            double best_s = kNegInf;
            for (std::size_t m = 0; m < cb.num_messages; ++m) {
                for (const Metric& d : bank.metrics) {
                    best_s = std::max(best_s, symbol_sum_score(d, cb.codeword(m), y));
                }
            }
            // the two accumulation orders round differently, so compare
            // scores instead of indices
            const std::size_t got = decode_gld(bank, cb, y);
            double got_s = kNegInf;
            for (const Metric& d : bank.metrics) {
                got_s = std::max(got_s, symbol_sum_score(d, cb.codeword(got), y));
            }
            CHECK(got_s >= best_s - 1e-9 * (1.0 + std::fabs(best_s)));
        }
    }
    SUBCASE("exhaustive agreement with exact maximum likelihood") {
        for (const BinaryChannel& w0 : {BinaryChannel(0.75, 0.3125), BinaryChannel(1.0, 0.625)}) {
            const ExactMl oracle(w0, 16);
            const Codebook cb = generate_codebook(8, 0.25, kU, 31);
            REQUIRE(cb.num_messages == 4);
            const MetricBank matched({likelihood_metric(w0)});
            for (unsigned yv = 0; yv < 256; ++yv) {
                BinaryWord y(8);
                for (int i = 0; i < 8; ++i) y.set_bit(i, (yv >> i) & 1);
                CHECK(decode_gld(matched, cb, y) == oracle.argmax(cb, y));
            }
        }
    }
    SUBCASE("ties break to the smallest index") {
        Codebook cb = generate_codebook(8, 0.125, kU, 2);
        // duplicate codeword 0 into codeword 1
        for (int l = 0; l < cb.limbs_per_word; ++l) {
            cb.storage[cb.limbs_per_word + l] = cb.storage[l];
        }
        cb.weights[1] = cb.weights[0];
        const BinaryWord y = cb.codeword(0);
        CHECK(decode_gld(MetricBank({likelihood_metric(BinaryChannel(0.8, 0.7))}), cb, y) == 0);
    }
    SUBCASE("all-impossible codewords fall back to index order") {
        const Codebook cb = generate_codebook(8, 0.25, InputDistribution(0.0), 11); // all-ones words
        const Metric z = likelihood_metric(BinaryChannel(0.5, 0.0)); // W(1|1) = 0
        const BinaryWord all_ones = cb.codeword(0);
        CHECK(decode_gld(MetricBank({z}), cb, all_ones) == 0);
    }
}

TEST_CASE("GLRT decoding") {
    const Codebook cb = generate_codebook(16, 0.25, kU, 77);
    SUBCASE("single listed channel reduces to matched ML") {
        const BinaryChannel w0(0.85, 0.6);
        const MetricBank matched({likelihood_metric(w0)});
        std::mt19937_64 rng(7);
        for (int rep = 0; rep < 200; ++rep) {
            BinaryWord y(16);
            for (int i = 0; i < 16; ++i) y.set_bit(i, rng() & 1);
            CHECK(decode_glrt({w0}, cb, y) == decode_gld(matched, cb, y));
        }
    }
    SUBCASE("pure-noise channel list degenerates to the tie-break index") {
        std::mt19937_64 rng(8);
        BinaryWord y(16);
        for (int i = 0; i < 16; ++i) y.set_bit(i, rng() & 1);
        CHECK(decode_glrt({BinaryChannel(0.5, 0.5)}, cb, y) == 0);
    }
    SUBCASE("empty channel list is rejected") {
        BinaryWord y(16);
        CHECK_THROWS_AS(decode_glrt({}, cb, y), std::invalid_argument);
    }
}

TEST_CASE("MMI decoding") {
    SUBCASE("recovers codewords of distinct nondegenerate types") {
        // weights 2, 4, 6, 8 over n = 12
        Codebook cb;
        cb.n = 12;
        cb.rate = 2.0 / 12.0;
        cb.num_messages = 4;
        cb.limbs_per_word = 1;
        cb.storage = {0x003, 0x00F, 0x03F, 0x0FF};
        cb.weights = {2, 4, 6, 8};
        for (std::size_t m = 0; m < 4; ++m) {
            // verify via direct type computation that m is the unique EMI argmax
            const BinaryWord y = cb.codeword(m);
            double best = -1.0;
            std::size_t best_m = 99;
            for (std::size_t j = 0; j < 4; ++j) {
                const JointDistribution t = joint_type(cb.codeword(j), y);
                const double emi = kl_divergence(t, product_marginal(t));
                if (emi > best + 1e-12) {
                    best = emi;
                    best_m = j;
                }
            }
            REQUIRE(best_m == m);
            CHECK(decode_mmi(cb, y) == m);
        }
    }
    SUBCASE("cannot distinguish a channel from its flipper") {
        const BinaryWord x = word_from_bits({1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1});
        const JointDistribution same = joint_type(x, x);
        const JointDistribution flip = joint_type(x, complement(x));
        CHECK(kl_divergence(same, product_marginal(same)) ==
              doctest::Approx(kl_divergence(flip, product_marginal(flip))).epsilon(1e-12));
    }
    SUBCASE("constant codewords carry zero empirical information") {
        const BinaryWord zeros(12);
        std::mt19937_64 rng(4);
        BinaryWord y(12);
        for (int i = 0; i < 12; ++i) y.set_bit(i, rng() & 1);
        const JointDistribution t = joint_type(zeros, y);
        CHECK(kl_divergence(t, product_marginal(t)) == 0.0);
    }
}

TEST_CASE("score shift invariance of decoders") {
    // Integer score tables make every sum exact, so decision equality is
    // sharp. A shared constant or a shared output shift g(y) moves every
    // codeword's score identically on any codebook; an input shift g(x)
    // does so only when the composition is fixed. (Shifting the metrics of
    // a bank by *different* constants can flip which branch wins the inner
    // max and is not an invariance for K >= 2.)
    std::mt19937_64 rng(23);
    const MetricBank bank({Metric({{{3.0, -2.0}, {0.0, 5.0}}}), Metric({{{1.0, 4.0}, {2.0, -6.0}}})});
    auto random_word = [&rng](int n) {
        BinaryWord y(n);
        for (int i = 0; i < n; ++i) y.set_bit(i, rng() & 1);
        return y;
    };
    auto shift_bank = [&](double c, double g0, double g1, double h0, double h1) {
        std::vector<Metric> out;
        for (const Metric& d : bank.metrics) {
            std::array<std::array<double, 2>, 2> s = d.d;
            for (int x = 0; x < 2; ++x) {
                for (int y = 0; y < 2; ++y) {
                    s[x][y] += c + (y == 0 ? g0 : g1) + (x == 0 ? h0 : h1);
                }
            }
            out.push_back(Metric(s));
        }
        return MetricBank(out);
    };

    SUBCASE("bank-wide constants on arbitrary codebooks") {
        const Codebook cb = generate_codebook(24, 0.2, InputDistribution(0.35), 43);
        const MetricBank shifted = shift_bank(7.0, 0, 0, 0, 0);
        for (int rep = 0; rep < 200; ++rep) {
            const BinaryWord y = random_word(24);
            CHECK(decode_gld(bank, cb, y) == decode_gld(shifted, cb, y));
        }
    }
    SUBCASE("output-only shifts on arbitrary codebooks") {
        const Codebook cb = generate_codebook(24, 0.2, InputDistribution(0.35), 43);
        const MetricBank shifted = shift_bank(0, 3.0, -5.0, 0, 0);
        for (int rep = 0; rep < 200; ++rep) {
            const BinaryWord y = random_word(24);
            CHECK(decode_gld(bank, cb, y) == decode_gld(shifted, cb, y));
        }
    }
    SUBCASE("input-only shifts on fixed-composition codebooks") {
        const Codebook cb = generate_codebook(24, 0.2, kU, 41, true);
        const MetricBank shifted = shift_bank(0, 0, 0, 2.0, -9.0);
        for (int rep = 0; rep < 200; ++rep) {
            const BinaryWord y = random_word(24);
            CHECK(decode_gld(bank, cb, y) == decode_gld(shifted, cb, y));
        }
    }
}

TEST_CASE("error estimation") {
    SUBCASE("noiseless channel with distinct codewords never errs") {
        const Codebook cb = generate_codebook(16, 0.125, kU, 3);
        const SimulationReport r =
            estimate_error(BinaryChannel(1.0, 1.0), cb, MatchedMl{}, 500, 19);
        CHECK(r.p_e_hat == 0.0);
        CHECK(r.errors == 0);
        CHECK(r.trials == 500);
        CHECK(r.decoder_tag == "ml");
    }
    SUBCASE("report fields are consistent") {
        const Codebook cb = generate_codebook(32, 0.125, kU, 5);
        const SimulationReport r =
            estimate_error(BinaryChannel(0.7, 0.6), cb, MatchedMl{}, 400, 23);
        CHECK(r.p_e_hat == doctest::Approx(double(r.errors) / 400.0));
        CHECK(r.ci95_halfwidth ==
              doctest::Approx(1.96 * std::sqrt(r.p_e_hat * (1 - r.p_e_hat) / 400.0)));
    }
    SUBCASE("too few trials are rejected") {
        const Codebook cb = generate_codebook(16, 0.125, kU, 3);
        CHECK_THROWS_AS(estimate_error(BinaryChannel(0.9, 0.9), cb, MatchedMl{}, 99, 1),
                        std::invalid_argument);
    }
    SUBCASE("identical seeds and any worker count produce identical reports") {
        const Codebook cb = generate_codebook(32, 0.15, kU, 7);
        const BinaryChannel w0(0.8, 0.7);
        const SimulationReport r1 = estimate_error(w0, cb, MatchedMl{}, 600, 99, 1);
        const SimulationReport r3 = estimate_error(w0, cb, MatchedMl{}, 600, 99, 3);
        CHECK(r1.errors == r3.errors);
        CHECK(r1.p_e_hat == r3.p_e_hat);
    }
    SUBCASE("block error rate falls with block length below the mismatched rate") {
        // R = 0.6 * I(U, W0) with W0 = (0.2, 0.3); the bank is the
        // class-universal reverse pair
        const BinaryChannel w0(0.2, 0.3);
        const double rate = 0.1147;
        const MetricBank bank = universal_pair(0.89);
        double prev = 1.0;
        for (int n : {35, 87, 139}) {
            const Codebook cb = generate_codebook(n, rate, kU, 301 + n);
            const SimulationReport r =
                estimate_error(w0, cb, GldDecoder{bank}, 2500, 401 + n);
            CHECK(r.p_e_hat < prev);
            prev = r.p_e_hat;
        }
        CHECK(prev < 0.2);
    }
}

TEST_CASE("fixed-composition order preservation") {
    SUBCASE("same-class BSC pairs preserve order") {
        const OrderCheckResult r =
            likelihood_order_check(BinaryChannel(0.89, 0.89), BinaryChannel(0.7, 0.7), 8);
        CHECK(r.holds);
        CHECK_FALSE(r.counterexample.has_value());
    }
    SUBCASE("self-comparison holds") {
        const BinaryChannel p(0.6, 0.9);
        CHECK(likelihood_order_check(p, p, 6).holds);
    }
    SUBCASE("opposite-class pairs violate the determinant precondition") {
        CHECK_THROWS_AS(
            likelihood_order_check(BinaryChannel(0.89, 0.89), BinaryChannel(0.11, 0.11), 8),
            DeterminantNonPositive);
    }
    SUBCASE("zero transitions break the equality clause, with a verified witness") {
        // Two words of one composition can both have likelihood exactly 0
        // under a Z-type channel while an interior channel separates them,
        // so order preservation genuinely fails on the boundary.
        const BinaryChannel p1(1.0, 0.5), p2(0.875, 0.75);
        const OrderCheckResult r = likelihood_order_check(p1, p2, 9);
        CHECK_FALSE(r.holds);
        REQUIRE(r.counterexample.has_value());
        const auto& ce = *r.counterexample;
        CHECK(ce.x1.weight() == ce.x2.weight());
        const ExactMl e1(p1, 8), e2(p2, 8);
        const int s1 = e1.likelihood(ce.x1, ce.y).compare(e1.likelihood(ce.x2, ce.y));
        const int s2 = e2.likelihood(ce.x1, ce.y).compare(e2.likelihood(ce.x2, ce.y));
        CHECK(((s1 > 0) - (s1 < 0)) != ((s2 > 0) - (s2 < 0)));
    }
    SUBCASE("block length cap") {
        CHECK_THROWS_AS(likelihood_order_check(BinaryChannel(0.9, 0.9), BinaryChannel(0.8, 0.8), 15),
                        std::invalid_argument);
    }
    SUBCASE("agrees with literal triple enumeration at n=5 (dyadic channels)") {
        const BinaryChannel p1(0.75, 0.625), p2(0.875, 0.75);
        const ExactMl e1(p1, 8), e2(p2, 8);
        REQUIRE(likelihood_order_check(p1, p2, 5).holds);
        for (unsigned x1v = 0; x1v < 32; ++x1v) {
            for (unsigned x2v = 0; x2v < 32; ++x2v) {
                if (std::popcount(x1v) != std::popcount(x2v)) continue;
                BinaryWord x1(5), x2(5);
                for (int i = 0; i < 5; ++i) {
                    x1.set_bit(i, (x1v >> i) & 1);
                    x2.set_bit(i, (x2v >> i) & 1);
                }
                for (unsigned yv = 0; yv < 32; ++yv) {
                    BinaryWord y(5);
                    for (int i = 0; i < 5; ++i) y.set_bit(i, (yv >> i) & 1);
                    const BigInt a1 = e1.likelihood(x1, y), a2 = e1.likelihood(x2, y);
                    const BigInt b1 = e2.likelihood(x1, y), b2 = e2.likelihood(x2, y);
                    const int s1 = a1.compare(a2), s2 = b1.compare(b2);
                    CHECK(((s1 > 0) - (s1 < 0)) == ((s2 > 0) - (s2 < 0)));
                }
            }
        }
    }
}
