#include "bmc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "bmc/errors.hpp"
#include "bmc/parallel.hpp"

namespace bmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// library implementations, unlike uniform_real_distribution.
inline double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int channel_draw(std::mt19937_64& rng, const BinaryChannel& w, int x) {
    const double u = next_unit(rng);
    if (x == 0) return u < w.a ? 0 : 1;
    return u < w.b ? 1 : 0;
}

double score_from_counts(const Metric& d, const JointCounts& c) {
    double s = 0.0;
    if (c.n00 > 0) { if (d(0, 0) == kNegInf) return kNegInf; s += c.n00 * d(0, 0); }
    if (c.n01 > 0) { if (d(0, 1) == kNegInf) return kNegInf; s += c.n01 * d(0, 1); }
    if (c.n10 > 0) { if (d(1, 0) == kNegInf) return kNegInf; s += c.n10 * d(1, 0); }
    if (c.n11 > 0) { if (d(1, 1) == kNegInf) return kNegInf; s += c.n11 * d(1, 1); }
    return s;
}

double empirical_mi(const JointCounts& c, int n) {
    const double counts[2][2] = {{double(c.n00), double(c.n01)}, {double(c.n10), double(c.n11)}};
    const double rows[2] = {counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]};
    const double cols[2] = {counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]};
    double acc = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double k = counts[x][y];
            if (k <= 0.0) continue;
            acc += (k / n) * std::log2(k * n / (rows[x] * cols[y]));
        }
    }
    return acc > 0.0 ? acc : 0.0;
}

struct CountAccess {
    const Codebook& cb;
    const BinaryWord& y;
    int wy;

    CountAccess(const Codebook& c, const BinaryWord& yy) : cb(c), y(yy), wy(yy.weight()) {}

    JointCounts at(std::size_t m) const noexcept {
        const std::uint64_t* xw = cb.word(m);
        int n11 = 0;
        for (int l = 0; l < cb.limbs_per_word; ++l) {
            n11 += std::popcount(xw[l] & y.limbs[l]);
        }
        const int wx = cb.weights[m];
        JointCounts c;
        c.n11 = n11;
        c.n10 = wx - n11;
        c.n01 = wy - n11;
        c.n00 = cb.n - wx - wy + n11;
        return c;
    }
};

std::size_t argmax_by_score(const Codebook& cb, const BinaryWord& y,
                            const std::vector<Metric>& metrics) {
    const CountAccess acc(cb, y);
    std::size_t best_m = 0;
    double best_s = kNegInf;
    bool have = false;
    for (std::size_t m = 0; m < cb.num_messages; ++m) {
        const JointCounts c = acc.at(m);
        double s = kNegInf;
        for (const Metric& d : metrics) {
            s = std::max(s, score_from_counts(d, c));
        }
        if (!have || s > best_s) {
            best_m = m;
            best_s = s;
            have = true;
        }
    }
    return best_m;
}

const std::vector<Metric>& resolve_bank(const DecoderSpec& spec, const BinaryChannel& w0,
                                        std::vector<Metric>& scratch) {
    if (std::holds_alternative<MatchedMl>(spec)) {
        scratch = {likelihood_metric(w0)};
        return scratch;
    }
    if (const auto* g = std::get_if<GldDecoder>(&spec)) {
        return g->bank.metrics;
    }
    if (const auto* g = std::get_if<GlrtDecoder>(&spec)) {
        scratch.clear();
        for (const BinaryChannel& w : g->channels) scratch.push_back(likelihood_metric(w));
        return scratch;
    }
    scratch.clear();
    return scratch; // MMI: no metric bank
}

// ---- exact likelihood comparison for the order-preservation check ----

using BigInt = boost::multiprecision::cpp_int;

// A transition probability as an exact dyadic rational mant * 2^exp2
// (doubles are dyadic), with zero flagged separately.
struct Dyadic {
    BigInt mant;
    long exp2 = 0;
    bool zero = false;
};

Dyadic to_dyadic(double p) {
    Dyadic d;
    if (p <= 0.0) {
        d.zero = true;
        return d;
    }
    int e;
    const double m = std::frexp(p, &e);               // p = m * 2^e, m in [0.5, 1)
    d.mant = static_cast<std::uint64_t>(std::ldexp(m, 53)); // exact for doubles
    d.exp2 = e - 53;
    return d;
}

struct ExactLikelihood {
    Dyadic probs[4]; // a, 1-a, 1-b, b  <->  counts n00, n01, n10, n11

    explicit ExactLikelihood(const BinaryChannel& w) {
        probs[0] = to_dyadic(w.a);
        probs[1] = to_dyadic(1.0 - w.a);
        probs[2] = to_dyadic(1.0 - w.b);
        probs[3] = to_dyadic(w.b);
    }

    // sign of P(y|x1) - P(y|x2) given the two joint-count vectors; exact.
    int compare(const JointCounts& c1, const JointCounts& c2) const {
        const int k1[4] = {c1.n00, c1.n01, c1.n10, c1.n11};
        const int k2[4] = {c2.n00, c2.n01, c2.n10, c2.n11};
        bool z1 = false, z2 = false;
        for (int i = 0; i < 4; ++i) {
            if (probs[i].zero && k1[i] > 0) z1 = true;
            if (probs[i].zero && k2[i] > 0) z2 = true;
        }
        if (z1 && z2) return 0;
        if (z1) return -1;
        if (z2) return 1;
        BigInt lhs = 1, rhs = 1;
        long e = 0;
        for (int i = 0; i < 4; ++i) {
            const int diff = k1[i] - k2[i];
            if (diff == 0) continue;
            if (diff > 0) {
                lhs *= boost::multiprecision::pow(probs[i].mant, static_cast<unsigned>(diff));
            } else {
                rhs *= boost::multiprecision::pow(probs[i].mant, static_cast<unsigned>(-diff));
            }
            e += static_cast<long>(diff) * probs[i].exp2;
        }
        if (e > 0) lhs <<= e;
        else if (e < 0) rhs <<= -e;
        const int c = lhs.compare(rhs);
        return (c > 0) - (c < 0);
    }
};

// Explicit witness words for a count configuration: y = 1^v 0^{n-v},
// x places k of its w ones on the support of y.
BinaryWord word_with_overlap(int n, int v, int w, int k) {
    BinaryWord x(n);
    for (int i = 0; i < k; ++i) x.set_bit(i, 1);
    for (int i = 0; i < w - k; ++i) x.set_bit(v + i, 1);
    return x;
}

} // namespace

BinaryWord::BinaryWord(int length) : n(length), limbs((length + 63) / 64, 0) {}

int BinaryWord::weight() const noexcept {
    int w = 0;
    for (std::uint64_t l : limbs) w += std::popcount(l);
    return w;
}

JointCounts joint_counts(const BinaryWord& x, const BinaryWord& y) {
    int n11 = 0;
    for (std::size_t l = 0; l < x.limbs.size(); ++l) {
        n11 += std::popcount(x.limbs[l] & y.limbs[l]);
    }
    const int wx = x.weight(), wy = y.weight();
    JointCounts c;
    c.n11 = n11;
    c.n10 = wx - n11;
    c.n01 = wy - n11;
    c.n00 = x.n - wx - wy + n11;
    return c;
}

JointDistribution joint_type(const BinaryWord& x, const BinaryWord& y) {
    const JointCounts c = joint_counts(x, y);
    const double n = x.n;
    return JointDistribution({{{c.n00 / n, c.n01 / n}, {c.n10 / n, c.n11 / n}}});
}

BinaryWord Codebook::codeword(std::size_t m) const {
    BinaryWord x(n);
    const std::uint64_t* src = word(m);
    std::copy(src, src + limbs_per_word, x.limbs.begin());
    return x;
}

Codebook generate_codebook(int n, double rate, const InputDistribution& p, std::uint64_t seed,
                           bool fixed_composition) {
    if (n < 1 || n > 4096) throw SizeExceeded("block length must lie in [1, 4096]");
    // ceil with a one-ulp guard so that e.g. 10 * 0.3 still yields 3 bits
    const double nr = static_cast<double>(n) * rate;
    const double bits = std::ceil(nr - 1e-9);
    if (bits > 20.0) {
        throw SizeExceeded("codebook would hold 2^" + std::to_string(static_cast<long>(bits)) +
                           " codewords; the cap is 2^20");
    }
    const int ebits = std::max(static_cast<int>(bits), 0);
    if (ebits < 1) throw SizeExceeded("codebook must hold at least 2 codewords");

    Codebook cb;
    cb.n = n;
    cb.rate = rate;
    cb.num_messages = std::size_t{1} << ebits;
    cb.composition_fixed = fixed_composition;
    cb.limbs_per_word = (n + 63) / 64;
    cb.storage.assign(cb.num_messages * static_cast<std::size_t>(cb.limbs_per_word), 0);
    cb.weights.assign(cb.num_messages, 0);

    std::mt19937_64 rng(seed);
    const double p1 = p(1);
    if (fixed_composition) {
        const int w = static_cast<int>(std::floor(n * p1 + 0.5));
        std::vector<int> base(n, 0);
        std::fill(base.begin(), base.begin() + w, 1);
        std::vector<int> perm(n);
        for (std::size_t m = 0; m < cb.num_messages; ++m) {
            perm = base;
            for (int i = n - 1; i > 0; --i) {
                // bounded draw by rejection; keeps the stream portable
                const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
                const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
                std::uint64_t r;
                do { r = rng(); } while (r >= limit);
                std::swap(perm[i], perm[static_cast<int>(r % bound)]);
            }
            std::uint64_t* dst = cb.storage.data() + m * cb.limbs_per_word;
            int weight = 0;
            for (int i = 0; i < n; ++i) {
                if (perm[i]) {
                    dst[i >> 6] |= std::uint64_t{1} << (i & 63);
                    ++weight;
                }
            }
            cb.weights[m] = weight;
        }
    } else {
        for (std::size_t m = 0; m < cb.num_messages; ++m) {
            std::uint64_t* dst = cb.storage.data() + m * cb.limbs_per_word;
            int weight = 0;
            for (int i = 0; i < n; ++i) {
                if (next_unit(rng) < p1) {
                    dst[i >> 6] |= std::uint64_t{1} << (i & 63);
                    ++weight;
                }
            }
            cb.weights[m] = weight;
        }
    }
    return cb;
}

BinaryWord transmit(const BinaryChannel& w0, const BinaryWord& x, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BinaryWord y(x.n);
    for (int i = 0; i < x.n; ++i) {
        y.set_bit(i, channel_draw(rng, w0, x.bit(i)));
    }
    return y;
}

std::size_t decode_gld(const MetricBank& bank, const Codebook& cb, const BinaryWord& y) {
    if (y.n != cb.n) throw std::invalid_argument("received word length must match the codebook");
    return argmax_by_score(cb, y, bank.metrics);
}

std::size_t decode_mmi(const Codebook& cb, const BinaryWord& y) {
    if (y.n != cb.n) throw std::invalid_argument("received word length must match the codebook");
    const CountAccess acc(cb, y);
    std::size_t best_m = 0;
    double best = -1.0;
    for (std::size_t m = 0; m < cb.num_messages; ++m) {
        const double emi = empirical_mi(acc.at(m), cb.n);
        if (emi > best) {
            best = emi;
            best_m = m;
        }
    }
    return best_m;
}

std::size_t decode_glrt(const std::vector<BinaryChannel>& channels, const Codebook& cb,
                        const BinaryWord& y) {
    if (channels.empty()) throw std::invalid_argument("GLRT needs at least one channel");
    std::vector<Metric> metrics;
    metrics.reserve(channels.size());
    for (const BinaryChannel& w : channels) metrics.push_back(likelihood_metric(w));
    return decode_gld(MetricBank(std::move(metrics)), cb, y);
}

std::string decoder_tag(const DecoderSpec& spec) {
    if (std::holds_alternative<MatchedMl>(spec)) return "ml";
    if (std::holds_alternative<GldDecoder>(spec)) return "gld";
    if (std::holds_alternative<GlrtDecoder>(spec)) return "glrt";
    return "mmi";
}

SimulationReport estimate_error(const BinaryChannel& w0, const Codebook& cb,
                                const DecoderSpec& decoder, std::uint64_t trials,
                                std::uint64_t seed, unsigned workers) {
    if (trials < 100) throw std::invalid_argument("at least 100 trials required");
    std::vector<Metric> scratch;
    const std::vector<Metric>& bank = resolve_bank(decoder, w0, scratch);
    const bool mmi = std::holds_alternative<MmiDecoder>(decoder);
    const std::uint64_t msg_mask = cb.num_messages - 1; // power of two

    const unsigned nw = resolve_workers(workers);
    std::atomic<std::uint64_t> errors{0};
    parallel_for(static_cast<std::size_t>(trials), nw, [&](std::size_t t) {
        std::mt19937_64 rng(seed + t);
        const std::size_t m = static_cast<std::size_t>(rng() & msg_mask);
        BinaryWord y(cb.n);
        const std::uint64_t* xw = cb.word(m);
        for (int i = 0; i < cb.n; ++i) {
            y.set_bit(i, channel_draw(rng, w0, (xw[i >> 6] >> (i & 63)) & 1u));
        }
        const std::size_t decoded = mmi ? decode_mmi(cb, y) : argmax_by_score(cb, y, bank);
        if (decoded != m) errors.fetch_add(1, std::memory_order_relaxed);
    });

    SimulationReport rep;
    rep.trials = trials;
    rep.errors = errors.load();
    rep.p_e_hat = static_cast<double>(rep.errors) / static_cast<double>(trials);
    rep.ci95_halfwidth = 1.96 * std::sqrt(rep.p_e_hat * (1.0 - rep.p_e_hat) / static_cast<double>(trials));
    rep.seed = seed;
    rep.decoder_tag = decoder_tag(decoder);
    return rep;
}

OrderCheckResult likelihood_order_check(const BinaryChannel& p1, const BinaryChannel& p2, int n) {
    if (n < 1 || n > 14) throw std::invalid_argument("order check supports 1 <= n <= 14");
    const double det_product = (p1.a + p1.b - 1.0) * (p2.a + p2.b - 1.0);
    if (!(det_product > 0.0)) {
        throw DeterminantNonPositive("det(P1 P2) must be positive, got " +
                                     std::to_string(det_product));
    }
    const ExactLikelihood l1(p1), l2(p2);

    // P(y|x) depends on (x, y) only through the joint counts, and within a
    // composition class those are determined by (weight(y), overlap). Every
    // (x1, x2, y) triple with weight(x)=w, weight(y)=v realizes exactly one
    // achievable overlap pair (k1, k2), and conversely, so sweeping the
    // count space is an exhaustive check of all triples.
    for (int w = 0; w <= n; ++w) {
        for (int v = 0; v <= n; ++v) {
            const int k_lo = std::max(0, w + v - n);
            const int k_hi = std::min(w, v);
            for (int k1 = k_lo; k1 <= k_hi; ++k1) {
                const JointCounts c1{n - w - v + k1, v - k1, w - k1, k1};
                for (int k2 = k_lo; k2 <= k_hi; ++k2) {
                    const JointCounts c2{n - w - v + k2, v - k2, w - k2, k2};
                    const int s1 = l1.compare(c1, c2);
                    const int s2 = l2.compare(c1, c2);
                    if (s1 == s2) continue;
                    OrderCounterexample ce;
                    BinaryWord y(n);
                    for (int i = 0; i < v; ++i) y.set_bit(i, 1);
                    ce.y = y;
                    ce.x1 = word_with_overlap(n, v, w, k1);
                    ce.x2 = word_with_overlap(n, v, w, k2);
                    return OrderCheckResult{false, ce};
                }
            }
        }
    }
    return OrderCheckResult{true, std::nullopt};
}

} // namespace bmc
