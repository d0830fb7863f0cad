#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bmc/channel.hpp"
#include "bmc/metric.hpp"

namespace bmc {

struct GameResult {
    double value;
    InputDistribution witness_input;
    BinaryChannel witness_channel;
    std::string resolution;
};

/// Finite set of channels, optionally split into components (given as
/// index lists that must cover the set exactly once).
struct ChannelSet {
    std::vector<BinaryChannel> channels;
    std::optional<std::vector<std::vector<std::size_t>>> partition;

    explicit ChannelSet(std::vector<BinaryChannel> chans,
                        std::optional<std::vector<std::vector<std::size_t>>> parts = std::nullopt);
};

/// Worst-case efficiency of a single input distribution:
/// max over a p0 grid of the infimum over an (a, b) channel grid of
/// I(P, W) / C(W). Channels with |a + b - 1| < exclusion_delta are skipped
/// (the ratio degenerates to 0/0 there); the per-p0 infimum is sharpened
/// with two levels of 10x local grid refinement around the incumbent
/// worst channel. Requires p_grid >= 101, channel_grid >= 128,
/// 0 < exclusion_delta < 0.5.
GameResult alpha_game(int p_grid, int channel_grid, double exclusion_delta,
                      unsigned workers = 0);

/// Worst-case ratio of the mismatched rate of a fixed bank to the matched
/// mutual information, over the delta-excluded channel grid.
GameResult beta_game(const MetricBank& bank, const InputDistribution& p, int channel_grid,
                     double exclusion_delta, unsigned workers = 0);

/// max over p0 of min over the set of I(p0, W), by ternary search on the
/// concave inner minimum. The witness channel attains the inner minimum at
/// the optimal input.
GameResult compound_capacity(const ChannelSet& s, double p_tolerance = 1e-9);

struct OneSidedResult {
    bool one_sided;
    double worst_slack;       ///< most negative Pythagorean slack observed
    std::size_t argmin_index; ///< index of the information-minimizing channel
};

/// Checks Pythagorean one-sidedness of a finite set with respect to P:
/// the minimizer W_S of I(P, .) must be unique (ties between non-identical
/// channels fail the check) and every member must satisfy
/// D(mu || mu_S^p) >= D(mu || mu_S) + D(mu_S || mu_S^p).
/// `samples` is accepted for interface stability; every listed channel is
/// always checked.
OneSidedResult one_sided_check(const ChannelSet& s, const InputDistribution& p,
                               std::size_t samples = 0);

/// For each component of the partition, finds the channel minimizing
/// I(P*, .) and returns the bank of its a-posteriori metrics in component
/// order. Throws NonUniqueMinimizer if a component minimum is attained by
/// two channels more than 1e-9 apart in (a, b).
MetricBank compound_metric_bank(const ChannelSet& s, const InputDistribution& p_star);

/// min over the delta-excluded channel grid of I(U, W) / C(W); the
/// uniform-input efficiency floor (no refinement).
GameResult uniform_efficiency_floor(int channel_grid, double exclusion_delta,
                                    unsigned workers = 0);

/// Row-major (a, b, ratio) sweep of I(P, W) / C(W) over the delta-excluded
/// grid, for CSV export.
std::vector<std::array<double, 3>> efficiency_grid(const InputDistribution& p, int channel_grid,
                                                   double exclusion_delta, unsigned workers = 0);

/// Row-major (a, b, ratio) sweep of I_mis(P, W, bank) / I(P, W) over the
/// delta-excluded grid, for CSV export.
std::vector<std::array<double, 3>> mismatch_ratio_grid(const MetricBank& bank,
                                                       const InputDistribution& p,
                                                       int channel_grid, double exclusion_delta,
                                                       unsigned workers = 0);

} // namespace bmc
