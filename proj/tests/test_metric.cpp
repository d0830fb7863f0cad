#include <doctest.h>

#include <cmath>
#include <limits>

#include "bmc/errors.hpp"
#include "bmc/metric.hpp"
#include "test_helpers.hpp"

using namespace bmc;

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TEST_CASE("metric construction rules") {
    CHECK_NOTHROW(Metric({{{0.0, -1.0}, {kNegInf, 2.0}}}));
    CHECK_THROWS_AS(Metric({{{0.0, std::numeric_limits<double>::infinity()}, {0.0, 0.0}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Metric({{{0.0, std::nan("")}, {0.0, 0.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(MetricBank({}), std::invalid_argument);
}

TEST_CASE("likelihood metric") {
    SUBCASE("BSC log transition table") {
        const Metric d = likelihood_metric(BinaryChannel(0.89, 0.89));
        CHECK(d(0, 0) == doctest::Approx(std::log2(0.89)));
        CHECK(d(0, 1) == doctest::Approx(std::log2(0.11)));
        CHECK(d(1, 0) == doctest::Approx(std::log2(0.11)));
        CHECK(d(1, 1) == doctest::Approx(std::log2(0.89)));
    }
    SUBCASE("zero transitions map to -infinity") {
        const Metric d = likelihood_metric(BinaryChannel(1.0, 0.5));
        CHECK(d(0, 1) == kNegInf);
        CHECK(d(0, 0) == 0.0);
        CHECK(d.has_neg_infinity());
    }
    SUBCASE("reversing a BSC swaps the metric columns") {
        const Metric d = likelihood_metric(BinaryChannel(0.7, 0.7));
        const Metric r = likelihood_metric(reverse(BinaryChannel(0.7, 0.7)));
        for (int x = 0; x < 2; ++x) {
            CHECK(r(x, 0) == doctest::Approx(d(x, 1)).epsilon(1e-14));
            CHECK(r(x, 1) == doctest::Approx(d(x, 0)).epsilon(1e-14));
        }
    }
}

TEST_CASE("a-posteriori metric") {
    const InputDistribution u = InputDistribution::uniform();

    SUBCASE("uniform output marginal shifts the likelihood by one bit") {
        const Metric apost = aposteriori_metric(u, BinaryChannel(0.89, 0.89));
        const Metric lik = likelihood_metric(BinaryChannel(0.89, 0.89));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                CHECK(apost(x, y) == doctest::Approx(lik(x, y) + 1.0).epsilon(1e-12));
    }
    SUBCASE("pure noise scores identically zero") {
        const Metric d = aposteriori_metric(u, BinaryChannel(0.5, 0.5));
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) CHECK(d(x, y) == 0.0);
    }
    SUBCASE("degenerate marginal is an error when a finite entry needs it") {
        CHECK_THROWS_AS(aposteriori_metric(InputDistribution(1.0), BinaryChannel(1.0, 1.0)),
                        DegenerateMarginal);
    }
    SUBCASE("zero transition still maps to -infinity") {
        const Metric d = aposteriori_metric(u, BinaryChannel(1.0, 0.5));
        CHECK(d(0, 1) == kNegInf);
    }
}

TEST_CASE("expectation with -infinity scores") {
    const JointDistribution uniform({{{0.25, 0.25}, {0.25, 0.25}}});
    const JointDistribution diag({{{0.5, 0.0}, {0.0, 0.5}}});
    const Metric z = likelihood_metric(BinaryChannel(1.0, 1.0)); // -inf off-diagonal

    CHECK(expectation(uniform, z) == kNegInf);
    CHECK(expectation(diag, z) == 0.0); // zero-mass cells ignore the -inf
    const Metric finite({{{1.0, 2.0}, {3.0, 4.0}}});
    CHECK(expectation(uniform, finite) == doctest::Approx(2.5));
}
