#pragma once

#include <array>
#include <optional>

namespace bmc {

enum class ChannelClass { Flipping, NonFlipping };

/// Binary memoryless channel, stored as the two diagonal transition
/// probabilities: a = W(0|0), b = W(1|1). Rows are implicitly stochastic,
/// W(1|0) = 1-a and W(0|1) = 1-b.
struct BinaryChannel {
    double a;
    double b;

    BinaryChannel(double w00, double w11);

    /// W(y|x)
    double operator()(int y, int x) const noexcept {
        if (x == 0) return y == 0 ? a : 1.0 - a;
        return y == 1 ? b : 1.0 - b;
    }
};

/// Flipping iff a + b < 1; the boundary a + b = 1 (pure noise) counts as
/// non-flipping.
ChannelClass class_of(const BinaryChannel& w) noexcept;

/// (a, b) -> (1-a, 1-b). Involution; swaps the class except on the boundary.
BinaryChannel reverse(const BinaryChannel& w) noexcept;

/// Distribution on the binary input alphabet, stored as P(0).
struct InputDistribution {
    double p0;

    explicit InputDistribution(double p_zero);

    double operator()(int x) const noexcept { return x == 0 ? p0 : 1.0 - p0; }

    static InputDistribution uniform() noexcept;
};

/// Distribution on {0,1}^2; m[x][y] = Pr(X = x, Y = y). Entries must be
/// nonnegative and sum to 1 within 1e-12.
struct JointDistribution {
    std::array<std::array<double, 2>, 2> m;

    explicit JointDistribution(const std::array<std::array<double, 2>, 2>& entries);

    double operator()(int x, int y) const noexcept { return m[x][y]; }

    /// Marginal on the input alphabet.
    double row_sum(int x) const noexcept { return m[x][0] + m[x][1]; }
    /// Marginal on the output alphabet.
    double col_sum(int y) const noexcept { return m[0][y] + m[1][y]; }
};

/// m[x][y] = P(x) W(y|x).
JointDistribution joint(const InputDistribution& p, const BinaryChannel& w);

/// Product of the marginals of mu: result[x][y] = mu_X(x) mu_Y(y).
JointDistribution product_marginal(const JointDistribution& mu);

/// D(mu || nu) in bits, with the conventions 0 log(0/q) = 0 and
/// mu > 0, nu = 0 => +infinity. Never negative.
double kl_divergence(const JointDistribution& mu, const JointDistribution& nu);

/// I(P, W) = D(joint || product_marginal(joint)) in bits.
double mutual_information(const InputDistribution& p, const BinaryChannel& w);

/// Closed-form capacity for Z-channels (a = 1 or b = 1), used as a
/// cross-check of the search-based capacity. Empty for other channels.
std::optional<double> z_channel_capacity(const BinaryChannel& w);

struct CapacityResult {
    double bits;
    InputDistribution input;
    std::optional<double> z_closed_form;
};

/// max_{p0} I(p0, W) by ternary search on the concave objective; p0 located
/// to within p_tol. Pure-noise channels (a + b = 1) return (0, uniform).
CapacityResult capacity(const BinaryChannel& w, double p_tol = 1e-12);

} // namespace bmc
