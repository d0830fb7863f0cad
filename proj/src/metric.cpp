#include "bmc/metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bmc/errors.hpp"

namespace bmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Metric::Metric(const std::array<std::array<double, 2>, 2>& entries) : d(entries) {
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double v = d[x][y];
            if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
                throw std::invalid_argument("metric entries must be finite or -infinity");
            }
        }
    }
}

bool Metric::has_neg_infinity() const noexcept {
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            if (d[x][y] == kNegInf) return true;
    return false;
}

MetricBank::MetricBank(std::vector<Metric> ms) : metrics(std::move(ms)) {
    if (metrics.empty()) throw std::invalid_argument("metric bank must hold at least one metric");
}

Metric likelihood_metric(const BinaryChannel& w) {
    std::array<std::array<double, 2>, 2> d{};
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double p = w(y, x);
            d[x][y] = p > 0.0 ? std::log2(p) : kNegInf;
        }
    }
    return Metric(d);
}

Metric aposteriori_metric(const InputDistribution& p, const BinaryChannel& w) {
    const JointDistribution mu = joint(p, w);
    const double my[2] = {mu.col_sum(0), mu.col_sum(1)};
    std::array<std::array<double, 2>, 2> d{};
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double t = w(y, x);
            if (t <= 0.0) {
                d[x][y] = kNegInf;
            } else if (my[y] <= 0.0) {
                throw DegenerateMarginal("output symbol " + std::to_string(y) +
                                         " has zero marginal probability but W(y|x) > 0");
            } else {
                d[x][y] = std::log2(t / my[y]);
            }
        }
    }
    return Metric(d);
}

double expectation(const JointDistribution& mu, const Metric& d) noexcept {
    double acc = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double p = mu(x, y);
            if (p <= 0.0) continue;
            if (d(x, y) == kNegInf) return kNegInf;
            acc += p * d(x, y);
        }
    }
    return acc;
}

} // namespace bmc
