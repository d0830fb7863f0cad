#pragma once

#include <array>
#include <vector>

#include "bmc/channel.hpp"

namespace bmc {

/// Single-letter decoding score table; d[x][y] scores the pair
/// (input x, output y). Entries are finite or -infinity (never +infinity
/// or NaN). Adding a constant to every entry leaves decoders and
/// mismatched rates unchanged.
struct Metric {
    std::array<std::array<double, 2>, 2> d;

    explicit Metric(const std::array<std::array<double, 2>, 2>& entries);

    double operator()(int x, int y) const noexcept { return d[x][y]; }

    bool has_neg_infinity() const noexcept;
};

/// Ordered, nonempty collection of metrics. Order matters only for
/// tie-breaking (lower index wins).
struct MetricBank {
    std::vector<Metric> metrics;

    explicit MetricBank(std::vector<Metric> ms);

    std::size_t size() const noexcept { return metrics.size(); }
    const Metric& operator[](std::size_t k) const noexcept { return metrics[k]; }
};

/// d[x][y] = log2 W(y|x); zero transitions map to -infinity.
Metric likelihood_metric(const BinaryChannel& w);

/// d[x][y] = log2( W(y|x) / mu_Y(y) ) with mu = joint(P, W).
/// Throws DegenerateMarginal if some finite entry would need mu_Y(y) = 0.
Metric aposteriori_metric(const InputDistribution& p, const BinaryChannel& w);

/// E_mu[d] with the convention that cells of zero probability contribute
/// nothing, even against a -infinity score. Returns -infinity iff mu puts
/// positive mass on a -infinity entry.
double expectation(const JointDistribution& mu, const Metric& d) noexcept;

} // namespace bmc
