#include "bmc/mismatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Signed direction pattern of the segment, indexed [x][y].
constexpr double kDir[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};

struct Interval {
    double lo, hi;
};

// Feasible parameter range {t : E_{mu(t)}[d] >= thr} intersected with the
// segment, empty optional if there is none. A metric with -infinity
// entries is feasible only where every such cell carries zero mass, which
// pins t to a single point (always a segment endpoint when reachable).
std::optional<Interval> feasible_interval(const TransportationSegment& seg, const Metric& d,
                                          double thr) {
    const double span = seg.t_max - seg.t_min;
    const double eps_t = 1e-12 * (span + 1.0);
    const double eps_e = 1e-12 * (1.0 + std::fabs(thr));

    if (thr == kNegInf) return Interval{seg.t_min, seg.t_max};

    if (d.has_neg_infinity()) {
        double pin_lo = kNegInf, pin_hi = kPosInf;
        const double pin[2][2] = {{-seg.center(0, 0), seg.center(0, 1)},
                                  {seg.center(1, 0), -seg.center(1, 1)}};
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                if (d(x, y) != kNegInf) continue;
                pin_lo = std::max(pin_lo, pin[x][y]);
                pin_hi = std::min(pin_hi, pin[x][y]);
            }
        }
        if (pin_lo - pin_hi > eps_t) return std::nullopt;
        if (pin_lo > seg.t_max + eps_t || pin_hi < seg.t_min - eps_t) return std::nullopt;
        const double t = std::clamp(0.5 * (pin_lo + pin_hi), seg.t_min, seg.t_max);
        const JointDistribution mu = seg.at(t);
        double e = 0.0;
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                if (d(x, y) == kNegInf || mu(x, y) <= 0.0) continue;
                e += mu(x, y) * d(x, y);
            }
        }
        if (e >= thr - eps_e) return Interval{t, t};
        return std::nullopt;
    }

    const double e0 = expectation(seg.center, d);
    const double g = d(0, 0) - d(0, 1) - d(1, 0) + d(1, 1);
    if (g == 0.0) {
        if (e0 >= thr - eps_e) return Interval{seg.t_min, seg.t_max};
        return std::nullopt;
    }
    const double boundary = (thr - e0) / g;
    double lo = g > 0.0 ? boundary : seg.t_min;
    double hi = g > 0.0 ? seg.t_max : boundary;
    if (lo > seg.t_max + eps_t || hi < seg.t_min - eps_t) return std::nullopt;
    lo = std::clamp(lo, seg.t_min, seg.t_max);
    hi = std::clamp(hi, seg.t_min, seg.t_max);
    return Interval{lo, hi};
}

// min of D(mu(t) || center) over a feasible interval: 0 at t = 0 when
// covered, otherwise the endpoint nearest 0 (D is convex in t with its
// minimum at the center).
SingleMetricRate minimize_on(const TransportationSegment& seg, const Interval& iv) {
    if (iv.lo <= 0.0 && 0.0 <= iv.hi) {
        return SingleMetricRate{0.0, seg.center};
    }
    const double t = iv.lo > 0.0 ? iv.lo : iv.hi;
    const JointDistribution mu = seg.at(t);
    return SingleMetricRate{kl_divergence(mu, seg.center), mu};
}

std::optional<SingleMetricRate> solve_segment(const TransportationSegment& seg, const Metric& d,
                                              double thr) {
    const auto iv = feasible_interval(seg, d, thr);
    if (!iv) return std::nullopt;
    return minimize_on(seg, *iv);
}

} // namespace

JointDistribution TransportationSegment::at(double t) const {
    std::array<std::array<double, 2>, 2> e{};
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            e[x][y] = std::max(center(x, y) + t * kDir[x][y], 0.0);
        }
    }
    return JointDistribution(e);
}

TransportationSegment marginal_segment(const JointDistribution& mu0) {
    JointDistribution center = product_marginal(mu0);
    const double t_min = -std::min(center(0, 0), center(1, 1));
    const double t_max = std::min(center(0, 1), center(1, 0));
    return TransportationSegment{std::move(center), t_min, t_max};
}

double bank_threshold(const JointDistribution& mu0, const MetricBank& bank) noexcept {
    double best = kNegInf;
    for (const Metric& d : bank.metrics) {
        best = std::max(best, expectation(mu0, d));
    }
    return best;
}

std::optional<SingleMetricRate> single_metric_rate(const InputDistribution& p,
                                                   const BinaryChannel& w0, const Metric& d,
                                                   double threshold) {
    return solve_segment(marginal_segment(joint(p, w0)), d, threshold);
}

MismatchResult mismatched_information(const InputDistribution& p, const BinaryChannel& w0,
                                      const MetricBank& bank) {
    const JointDistribution mu0 = joint(p, w0);
    const TransportationSegment seg = marginal_segment(mu0);
    const double thr = bank_threshold(mu0, bank);
    if (thr == kNegInf) {
        return MismatchResult{0.0, 0, seg.center, thr};
    }
    std::optional<MismatchResult> best;
    for (std::size_t k = 0; k < bank.size(); ++k) {
        const auto r = solve_segment(seg, bank[k], thr);
        if (!r) continue;
        if (!best || r->bits > best->bits) {
            best = MismatchResult{r->bits, k, r->minimizer, thr};
        }
    }
    // The threshold-attaining metric always admits mu0 itself, so an empty
    // result can only arise from last-ulp rounding; report rate 0.
    if (!best) return MismatchResult{0.0, 0, seg.center, thr};
    return *best;
}

double mismatched_information_oracle(const InputDistribution& p, const BinaryChannel& w0,
                                     const MetricBank& bank, std::size_t grid_points) {
    if (grid_points < 1000) {
        throw std::invalid_argument("oracle needs at least 1000 grid points");
    }
    const JointDistribution mu0 = joint(p, w0);
    const TransportationSegment seg = marginal_segment(mu0);
    const double thr = bank_threshold(mu0, bank);
    const double eps_e = 1e-12 * (1.0 + std::fabs(thr));
    const std::size_t k_count = bank.size();

    const double c00 = seg.center(0, 0), c01 = seg.center(0, 1);
    const double c10 = seg.center(1, 0), c11 = seg.center(1, 1);
    const double step = (seg.t_max - seg.t_min) / static_cast<double>(grid_points - 1);

    std::vector<double> best(k_count, kPosInf);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = i + 1 == grid_points ? seg.t_max : seg.t_min + step * static_cast<double>(i);
        const double m[4] = {std::max(c00 + t, 0.0), std::max(c01 - t, 0.0),
                             std::max(c10 - t, 0.0), std::max(c11 + t, 0.0)};
        double div = -1.0; // computed lazily, shared across metrics
        for (std::size_t k = 0; k < k_count; ++k) {
            const Metric& d = bank[k];
            double e = 0.0;
            if (m[0] > 0.0) { if (d(0, 0) == kNegInf) continue; e += m[0] * d(0, 0); }
            if (m[1] > 0.0) { if (d(0, 1) == kNegInf) continue; e += m[1] * d(0, 1); }
            if (m[2] > 0.0) { if (d(1, 0) == kNegInf) continue; e += m[2] * d(1, 0); }
            if (m[3] > 0.0) { if (d(1, 1) == kNegInf) continue; e += m[3] * d(1, 1); }
            if (e < thr - eps_e) continue;
            if (div < 0.0) {
                div = 0.0;
                if (m[0] > 0.0) div += m[0] * std::log2(m[0] / c00);
                if (m[1] > 0.0) div += m[1] * std::log2(m[1] / c01);
                if (m[2] > 0.0) div += m[2] * std::log2(m[2] / c10);
                if (m[3] > 0.0) div += m[3] * std::log2(m[3] / c11);
                if (div < 0.0) div = 0.0;
            }
            best[k] = std::min(best[k], div);
        }
    }

    double out = kNegInf;
    for (double v : best) {
        if (v != kPosInf) out = std::max(out, v);
    }
    return out == kNegInf ? 0.0 : out;
}

} // namespace bmc
