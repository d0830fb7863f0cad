#pragma once

#include <cstddef>
#include <optional>

#include "bmc/channel.hpp"
#include "bmc/metric.hpp"

namespace bmc {

/// One-parameter family of joint distributions sharing both marginals of
/// an anchor: center + t * [[+1,-1],[-1,+1]] for t in [t_min, t_max],
/// the range being the largest interval keeping all entries nonnegative.
/// With center = product of the anchor's marginals, t = 0 is the unique
/// zero-divergence point of the family.
struct TransportationSegment {
    JointDistribution center;
    double t_min;
    double t_max;

    /// Joint distribution at parameter t (entries clamped at exact zero
    /// against last-ulp negatives).
    JointDistribution at(double t) const;

    /// Parameter of a family member: t = mu[0][0] - center[0][0].
    double offset_of(const JointDistribution& mu) const noexcept {
        return mu(0, 0) - center(0, 0);
    }
};

/// Segment through mu0 anchored at its product of marginals.
TransportationSegment marginal_segment(const JointDistribution& mu0);

/// max_j E_{mu0}[d_j]; -infinity iff every metric has -infinity
/// expectation under mu0.
double bank_threshold(const JointDistribution& mu0, const MetricBank& bank) noexcept;

struct SingleMetricRate {
    double bits;
    JointDistribution minimizer;
};

/// min D(mu || mu0^p) over the marginal segment of joint(P, W0) subject to
/// E_mu[d] >= threshold (the threshold being the bank-wide value).
/// Empty optional means the constraint set is empty.
std::optional<SingleMetricRate> single_metric_rate(const InputDistribution& p,
                                                   const BinaryChannel& w0, const Metric& d,
                                                   double threshold);

struct MismatchResult {
    double bits;
    std::size_t achieved_by; ///< smallest index attaining the max
    JointDistribution minimizer;
    double threshold;
};

/// Mismatched mutual information of a generalized linear decoder:
/// max over metrics of the single-metric constrained minimization, all
/// constraints sharing the bank threshold. Metrics with empty constraint
/// sets are skipped.
MismatchResult mismatched_information(const InputDistribution& p, const BinaryChannel& w0,
                                      const MetricBank& bank);

/// Brute-force check of mismatched_information: sweeps grid_points
/// equally spaced segment parameters, keeps the feasible ones per metric
/// by direct expectation, takes min D then max over metrics. No use of
/// convexity or interval algebra. grid_points must be >= 1000.
double mismatched_information_oracle(const InputDistribution& p, const BinaryChannel& w0,
                                     const MetricBank& bank, std::size_t grid_points);

} // namespace bmc
