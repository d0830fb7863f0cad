#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bmc/channel.hpp"
#include "bmc/parallel.hpp"
#include "test_helpers.hpp"

using namespace bmc;
using testutil::h2;

namespace {
JointDistribution make_joint(double m00, double m01, double m10, double m11) {
    return JointDistribution({{{m00, m01}, {m10, m11}}});
}
} // namespace

TEST_CASE("joint distribution of input and channel") {
    const InputDistribution u = InputDistribution::uniform();

    SUBCASE("noiseless channel at uniform input") {
        const JointDistribution m = joint(u, BinaryChannel(1.0, 1.0));
        CHECK(m(0, 0) == 0.5);
        CHECK(m(0, 1) == 0.0);
        CHECK(m(1, 0) == 0.0);
        CHECK(m(1, 1) == 0.5);
    }
    SUBCASE("pure-noise channel gives the uniform joint") {
        const JointDistribution m = joint(u, BinaryChannel(0.5, 0.5));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) CHECK(m(x, y) == 0.25);
    }
    SUBCASE("generic entries are P(x) W(y|x)") {
        const JointDistribution m = joint(InputDistribution(0.3), BinaryChannel(0.9, 0.8));
        CHECK(m(0, 0) == doctest::Approx(0.27).epsilon(1e-14));
        CHECK(m(0, 1) == doctest::Approx(0.03).epsilon(1e-14));
        CHECK(m(1, 0) == doctest::Approx(0.14).epsilon(1e-14));
        CHECK(m(1, 1) == doctest::Approx(0.56).epsilon(1e-14));
    }
    SUBCASE("invalid inputs are rejected") {
        CHECK_THROWS_AS(BinaryChannel(-0.1, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(BinaryChannel(0.1, 1.5), std::invalid_argument);
        CHECK_THROWS_AS(InputDistribution(1.0001), std::invalid_argument);
        CHECK_THROWS_AS(make_joint(0.5, 0.5, 0.5, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(make_joint(-0.25, 0.5, 0.5, 0.25), std::invalid_argument);
    }
}

TEST_CASE("product of marginals") {
    SUBCASE("a product distribution is a fixed point") {
        const JointDistribution m = product_marginal(make_joint(0.25, 0.25, 0.25, 0.25));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) CHECK(m(x, y) == 0.25);
    }
    SUBCASE("diagonal half-half flattens to uniform") {
        const JointDistribution m = product_marginal(make_joint(0.5, 0.0, 0.0, 0.5));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) CHECK(m(x, y) == 0.25);
    }
    SUBCASE("generic marginal products") {
        const JointDistribution m = product_marginal(make_joint(0.27, 0.03, 0.14, 0.56));
        CHECK(m(0, 0) == doctest::Approx(0.123).epsilon(1e-12));
        CHECK(m(0, 1) == doctest::Approx(0.177).epsilon(1e-12));
        CHECK(m(1, 0) == doctest::Approx(0.287).epsilon(1e-12));
        CHECK(m(1, 1) == doctest::Approx(0.413).epsilon(1e-12));
    }
}

TEST_CASE("KL divergence conventions") {
    const JointDistribution uniform = make_joint(0.25, 0.25, 0.25, 0.25);

    CHECK(kl_divergence(uniform, uniform) == 0.0);
    CHECK(kl_divergence(make_joint(0.5, 0.0, 0.0, 0.5), uniform) == doctest::Approx(1.0));
    CHECK(kl_divergence(make_joint(0.45, 0.05, 0.05, 0.45), uniform) ==
          doctest::Approx(1.0 - h2(0.1)).epsilon(1e-12));

    SUBCASE("absolute-continuity failure yields infinity, not an error") {
        const double v = kl_divergence(uniform, make_joint(0.5, 0.0, 0.0, 0.5));
        CHECK(std::isinf(v));
        CHECK(v > 0);
    }
    SUBCASE("nonnegative, zero only at equality (random pairs)") {
        std::mt19937_64 rng(71);
        for (int i = 0; i < 10000; ++i) {
            const JointDistribution mu = joint(InputDistribution(testutil::unit(rng)),
                                               testutil::random_channel(rng));
            const JointDistribution nu = joint(InputDistribution(testutil::unit(rng)),
                                               testutil::random_channel(rng));
            const double d = kl_divergence(mu, nu);
            CHECK(d >= 0.0);
            double linf = 0.0;
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) linf = std::max(linf, std::fabs(mu(x, y) - nu(x, y)));
            if (d <= 1e-12 && !std::isinf(d)) CHECK(linf <= 1e-5);
            if (linf <= 1e-13) CHECK(d <= 1e-12);
        }
    }
}

TEST_CASE("mutual information") {
    const InputDistribution u = InputDistribution::uniform();

    CHECK(mutual_information(u, BinaryChannel(0.3, 0.7)) <= 1e-15); // a+b = 1
    CHECK(mutual_information(u, BinaryChannel(0.89, 0.89)) ==
          doctest::Approx(1.0 - h2(0.11)).epsilon(1e-12));
    CHECK(mutual_information(InputDistribution(1.0), BinaryChannel(0.9, 0.2)) <= 1e-15);

    SUBCASE("agrees with the KL composition on a grid") {
        for (int i = 0; i <= 16; ++i) {
            for (int j = 0; j <= 16; ++j) {
                const BinaryChannel w(i / 16.0, j / 16.0);
                const JointDistribution mu = joint(u, w);
                const double via_kl = kl_divergence(mu, product_marginal(mu));
                CHECK(mutual_information(u, w) == doctest::Approx(via_kl).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("capacity") {
    SUBCASE("BSC capacity at the uniform input") {
        const CapacityResult r = capacity(BinaryChannel(0.89, 0.89));
        CHECK(r.bits == doctest::Approx(1.0 - h2(0.11)).epsilon(1e-12));
        CHECK(r.input.p0 == doctest::Approx(0.5).epsilon(1e-8));
        CHECK_FALSE(r.z_closed_form.has_value());
    }
    SUBCASE("Z-channel against the closed form") {
        const CapacityResult r = capacity(BinaryChannel(1.0, 0.5));
        CHECK(r.bits == doctest::Approx(std::log2(1.25)).epsilon(1e-12));
        REQUIRE(r.z_closed_form.has_value());
        CHECK(*r.z_closed_form == doctest::Approx(r.bits).epsilon(1e-10));
        CHECK(r.bits == doctest::Approx(testutil::z_capacity(0.5)).epsilon(1e-12));
    }
    SUBCASE("noiseless channel") {
        const CapacityResult r = capacity(BinaryChannel(1.0, 1.0));
        CHECK(r.bits == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.input.p0 == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("pure noise short-circuits to zero at uniform") {
        const CapacityResult r = capacity(BinaryChannel(0.25, 0.75));
        CHECK(r.bits == 0.0);
        CHECK(r.input.p0 == 0.5);
    }
    SUBCASE("z_channel_capacity covers both orientations and degenerate corners") {
        CHECK(z_channel_capacity(BinaryChannel(0.6, 1.0)).value() ==
              doctest::Approx(testutil::z_capacity(0.4)).epsilon(1e-12));
        CHECK(z_channel_capacity(BinaryChannel(1.0, 1.0)).value() == doctest::Approx(1.0));
        CHECK(z_channel_capacity(BinaryChannel(1.0, 0.0)).value() == doctest::Approx(0.0));
        CHECK_FALSE(z_channel_capacity(BinaryChannel(0.9, 0.8)).has_value());
    }
    SUBCASE("dominates the uniform input, within 5.8 percent, on a 256x256 grid") {
        const InputDistribution u = InputDistribution::uniform();
        const int g = 256;
        std::vector<char> ok(static_cast<std::size_t>(g) * g, 1);
        parallel_for(ok.size(), resolve_workers(0), [&](std::size_t idx) {
            const BinaryChannel w((idx / g) / (g - 1.0), (idx % g) / (g - 1.0));
            const double cap_bits = capacity(w).bits;
            const double miu = mutual_information(u, w);
            if (miu > cap_bits + 1e-12) ok[idx] = 0;
            if (miu < 0.942 * cap_bits - 1e-12) ok[idx] = 0;
        });
        CHECK(std::count(ok.begin(), ok.end(), 0) == 0);
    }
}

TEST_CASE("reverse and channel classes") {
    const BinaryChannel w(0.9, 0.8);

    SUBCASE("definition and involution") {
        const BinaryChannel r = reverse(w);
        CHECK(r.a == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(r.b == doctest::Approx(0.2).epsilon(1e-15));
        const BinaryChannel rr = reverse(reverse(BinaryChannel(0.3, 0.4)));
        CHECK(rr.a == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(rr.b == doctest::Approx(0.4).epsilon(1e-15));
    }
    SUBCASE("class flips under reversal away from the boundary") {
        CHECK(class_of(w) == ChannelClass::NonFlipping);
        CHECK(class_of(reverse(w)) == ChannelClass::Flipping);
    }
    SUBCASE("boundary and corner classes") {
        CHECK(class_of(BinaryChannel(0.0, 0.0)) == ChannelClass::Flipping);
        CHECK(class_of(BinaryChannel(1.0, 1.0)) == ChannelClass::NonFlipping);
        CHECK(class_of(BinaryChannel(0.5, 0.5)) == ChannelClass::NonFlipping);
    }
    SUBCASE("uniform-input information is reversal-invariant on a grid") {
        const InputDistribution u = InputDistribution::uniform();
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const BinaryChannel c(i / 20.0, j / 20.0);
                CHECK(mutual_information(u, c) ==
                      doctest::Approx(mutual_information(u, reverse(c))).epsilon(1e-12));
            }
        }
    }
}
