#include "bmc/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bmc {

namespace {

void require_probability(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                    std::to_string(v));
    }
}

} // namespace

BinaryChannel::BinaryChannel(double w00, double w11) : a(w00), b(w11) {
    require_probability(a, "W(0|0)");
    require_probability(b, "W(1|1)");
}

ChannelClass class_of(const BinaryChannel& w) noexcept {
    return w.a + w.b < 1.0 ? ChannelClass::Flipping : ChannelClass::NonFlipping;
}

BinaryChannel reverse(const BinaryChannel& w) noexcept {
    return BinaryChannel(1.0 - w.a, 1.0 - w.b);
}

InputDistribution::InputDistribution(double p_zero) : p0(p_zero) {
    require_probability(p0, "P(0)");
}

InputDistribution InputDistribution::uniform() noexcept {
    return InputDistribution(0.5);
}

JointDistribution::JointDistribution(const std::array<std::array<double, 2>, 2>& entries)
    : m(entries) {
    double sum = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            double v = m[x][y];
            if (!(v >= 0.0)) {
                throw std::invalid_argument("joint distribution entries must be nonnegative");
            }
            sum += v;
        }
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("joint distribution entries must sum to 1, got " +
                                    std::to_string(sum));
    }
}

JointDistribution joint(const InputDistribution& p, const BinaryChannel& w) {
    return JointDistribution({{{p(0) * w(0, 0), p(0) * w(1, 0)},
                               {p(1) * w(0, 1), p(1) * w(1, 1)}}});
}

JointDistribution product_marginal(const JointDistribution& mu) {
    const double r0 = mu.row_sum(0), r1 = mu.row_sum(1);
    const double c0 = mu.col_sum(0), c1 = mu.col_sum(1);
    return JointDistribution({{{r0 * c0, r0 * c1}, {r1 * c0, r1 * c1}}});
}

double kl_divergence(const JointDistribution& mu, const JointDistribution& nu) {
    double acc = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const double p = mu(x, y);
            if (p <= 0.0) continue;
            const double q = nu(x, y);
            if (q <= 0.0) return std::numeric_limits<double>::infinity();
            acc += p * std::log2(p / q);
        }
    }
    return acc > 0.0 ? acc : 0.0;
}

double mutual_information(const InputDistribution& p, const BinaryChannel& w) {
    const JointDistribution mu = joint(p, w);
    return kl_divergence(mu, product_marginal(mu));
}

std::optional<double> z_channel_capacity(const BinaryChannel& w) {
    double eps;
    if (w.a == 1.0) {
        eps = 1.0 - w.b;
    } else if (w.b == 1.0) {
        eps = 1.0 - w.a;
    } else {
        return std::nullopt;
    }
    if (eps >= 1.0) return 0.0;
    // C = log2(1 + (1-eps) eps^{eps/(1-eps)}), the eps -> 0 limit being 1 bit.
    return std::log2(1.0 + (1.0 - eps) * std::pow(eps, eps / (1.0 - eps)));
}

CapacityResult capacity(const BinaryChannel& w, double p_tol) {
    if (w.a + w.b == 1.0) {
        return CapacityResult{0.0, InputDistribution::uniform(), z_channel_capacity(w)};
    }
    double lo = 0.0, hi = 1.0;
    while (hi - lo > p_tol) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (mutual_information(InputDistribution(m1), w) <
            mutual_information(InputDistribution(m2), w)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    const InputDistribution best(0.5 * (lo + hi));
    return CapacityResult{mutual_information(best, w), best, z_channel_capacity(w)};
}

} // namespace bmc
