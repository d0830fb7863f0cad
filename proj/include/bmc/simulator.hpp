#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bmc/channel.hpp"
#include "bmc/metric.hpp"

namespace bmc {

/// Bit-packed binary word of length n (LSB-first within 64-bit limbs,
/// padding bits zero).
struct BinaryWord {
    int n = 0;
    std::vector<std::uint64_t> limbs;

    BinaryWord() = default;
    explicit BinaryWord(int length);

    int bit(int i) const noexcept { return (limbs[i >> 6] >> (i & 63)) & 1u; }
    void set_bit(int i, int v) noexcept {
        if (v) limbs[i >> 6] |= std::uint64_t{1} << (i & 63);
        else limbs[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    int weight() const noexcept;

    bool operator==(const BinaryWord&) const = default;
};

/// Joint symbol counts of a word pair: counts[x][y] = #{i : x(i)=x, y(i)=y}.
struct JointCounts {
    int n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};

JointCounts joint_counts(const BinaryWord& x, const BinaryWord& y);

/// Empirical joint type of (x, y) as a distribution.
JointDistribution joint_type(const BinaryWord& x, const BinaryWord& y);

/// Random codebook of 2^ceil(n*rate) words of length n. Codeword symbols
/// are i.i.d. from P, or, when composition_fixed, each codeword is a
/// uniformly random permutation of the word with floor(n*P(1)+0.5) ones.
/// Deterministic given the seed.
struct Codebook {
    int n = 0;
    double rate = 0.0;
    std::size_t num_messages = 0;
    bool composition_fixed = false;
    int limbs_per_word = 0;
    std::vector<std::uint64_t> storage; ///< num_messages x limbs_per_word
    std::vector<int> weights;           ///< Hamming weight per codeword

    const std::uint64_t* word(std::size_t m) const noexcept {
        return storage.data() + m * static_cast<std::size_t>(limbs_per_word);
    }
    BinaryWord codeword(std::size_t m) const;
};

/// Throws SizeExceeded unless 2 <= 2^ceil(n*rate) <= 2^20 and n <= 4096.
Codebook generate_codebook(int n, double rate, const InputDistribution& p, std::uint64_t seed,
                           bool fixed_composition = false);

/// Per-symbol i.i.d. channel pass, deterministic given the seed.
BinaryWord transmit(const BinaryChannel& w0, const BinaryWord& x, std::uint64_t seed);

/// Generalized linear decoder: argmax over messages of the best additive
/// metric score, ties to the smallest index. Scores with -infinity are
/// ranked below every finite score.
std::size_t decode_gld(const MetricBank& bank, const Codebook& cb, const BinaryWord& y);

/// Maximum empirical mutual information decoder.
std::size_t decode_mmi(const Codebook& cb, const BinaryWord& y);

/// GLRT: generalized linear decoding with the log-likelihood metrics of
/// the listed channels.
std::size_t decode_glrt(const std::vector<BinaryChannel>& channels, const Codebook& cb,
                        const BinaryWord& y);

/// Decoder selection for Monte Carlo runs. MatchedMl scores with the
/// log-likelihood metric of the true channel.
struct MatchedMl {};
struct GldDecoder { MetricBank bank; };
struct GlrtDecoder { std::vector<BinaryChannel> channels; };
struct MmiDecoder {};
using DecoderSpec = std::variant<MatchedMl, GldDecoder, GlrtDecoder, MmiDecoder>;

std::string decoder_tag(const DecoderSpec& spec);

struct SimulationReport {
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double p_e_hat = 0.0;
    double ci95_halfwidth = 0.0;
    std::uint64_t seed = 0;
    std::string decoder_tag;
};

/// Monte Carlo block error rate over uniformly drawn messages. Trial t
/// derives its own generator from seed + t, so results are independent of
/// scheduling and worker count. Requires trials >= 100.
SimulationReport estimate_error(const BinaryChannel& w0, const Codebook& cb,
                                const DecoderSpec& decoder, std::uint64_t trials,
                                std::uint64_t seed, unsigned workers = 0);

struct OrderCounterexample {
    BinaryWord x1, x2, y;
};

struct OrderCheckResult {
    bool holds = false;
    std::optional<OrderCounterexample> counterexample;
};

/// Exhaustive fixed-composition order-preservation check: for stochastic
/// matrices P1, P2 with det(P1 P2) > 0, equal-composition words must
/// satisfy P1(y|x1) > P1(y|x2) => P2(y|x1) > P2(y|x2), and likewise for
/// equality. Likelihood comparisons are exact (dyadic-rational
/// arithmetic), and since a likelihood depends on (x, y) only through the
/// joint counts, sweeping all achievable count pairs per composition
/// covers every (x1, x2, y) triple. Requires n <= 14 and the determinant
/// condition (else DeterminantNonPositive).
OrderCheckResult likelihood_order_check(const BinaryChannel& p1, const BinaryChannel& p2, int n);

} // namespace bmc
