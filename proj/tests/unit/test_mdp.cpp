#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lookahead/mdp.hpp"
#include "lookahead/serialization.hpp"
#include "lookahead/theory.hpp"
#include "oracles.hpp"

using namespace lookahead;

namespace {

TabularMdp single_state(double reward) { return TabularMdp(1, 1, {1.0}, {reward}); }

}  // namespace

TEST(ValidateMdp, IdentityCaseIsClean) { EXPECT_TRUE(validate_mdp(single_state(0.0)).ok()); }

TEST(ValidateMdp, ReportsShortRow) {
    auto mdp = TabularMdp::zeros(2, 2);
    for (Action a = 0; a < 2; ++a)
        for (State s = 0; s < 2; ++s) mdp.transition(a, s, s) = 1.0;
    mdp.transition(1, 0, 0) = 0.9;
    const auto report = validate_mdp(mdp);
    ASSERT_FALSE(report.ok());
    EXPECT_TRUE(report.mentions(1, 0));
    EXPECT_FALSE(report.mentions(0, 0));
}

TEST(ValidateMdp, ReportsNegativeEntryAndNonFiniteReward) {
    auto mdp = TabularMdp(1, 2, {1.0, 1.0}, {0.0, 0.0});
    mdp.row(0, 0)[0] = -0.5;
    mdp.reward(0, 1) = std::numeric_limits<double>::quiet_NaN();
    const auto report = validate_mdp(mdp);
    EXPECT_TRUE(report.mentions(0, 0));
    EXPECT_GE(report.violations.size(), 2u);
}

TEST(ValidateMdp, LinearGapInstancesAreClean) {
    for (std::size_t S : {2, 3, 4, 6})
        for (std::size_t A : {2, 3})
            for (std::size_t K : {1, 2, 3}) EXPECT_TRUE(validate_mdp(build_linear_gap_instance(S, A, K)).ok());
}

TEST(TabularMdp, ShapeErrors) {
    EXPECT_THROW(TabularMdp(2, 2, {1.0}, {0, 0, 0, 0}), std::invalid_argument);
    EXPECT_THROW(TabularMdp(0, 1, {}, {}), std::invalid_argument);
    EXPECT_THROW(TabularMdp(1, 1, {1.0}, {0.0}, RewardNoiseSpec::gaussian(-1.0)), std::invalid_argument);
}

TEST(SampleTransition, DeterministicRowIgnoresDraw) {
    auto mdp = TabularMdp(3, 1, {0, 0, 1, 0, 0, 1, 0, 0, 1}, {0, 0, 0});
    RngStream rng(5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_transition(mdp, 1, 0, rng), 2u);
}

TEST(SampleTransition, BoundaryGoesToLowerIndex) {
    const std::vector<double> row{0.7, 0.3};
    EXPECT_EQ(sample_from_row(row, 0.70), 0u);
    EXPECT_EQ(sample_from_row(row, std::nextafter(0.70, 1.0)), 1u);
    EXPECT_EQ(sample_from_row(row, 0.0), 0u);
    const std::vector<double> gap{0.0, 1.0};
    EXPECT_EQ(sample_from_row(gap, 0.0), 1u);
}

TEST(SampleTransition, OutOfRangeIsUsageError) {
    RngStream rng(1);
    EXPECT_THROW(sample_transition(single_state(0.0), 1, 0, rng), std::out_of_range);
    EXPECT_THROW(sample_transition(single_state(0.0), 0, 3, rng), std::out_of_range);
}

TEST(SampleTransition, UniformRowFrequencies) {
    auto mdp = TabularMdp::zeros(4, 1);
    for (State s = 0; s < 4; ++s)
        for (State s2 = 0; s2 < 4; ++s2) mdp.transition(0, s, s2) = 0.25;
    RngStream rng(77);
    std::vector<int> counts(4, 0);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) ++counts[sample_transition(mdp, 0, 0, rng)];
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 0.005);
}

TEST(SampleTransition, EmpiricalFrequenciesWithinThreeSigma) {
    RngStream gen(101);
    const auto mdp = oracle::random_mdp(6, 3, gen);
    RngStream rng(202);
    const int n = 100000;
    int within = 0, total = 0;
    for (Action a = 0; a < 3; ++a)
        for (State s = 0; s < 6; ++s) {
            std::vector<int> counts(6, 0);
            for (int i = 0; i < n; ++i) ++counts[sample_transition(mdp, s, a, rng)];
            for (State s2 = 0; s2 < 6; ++s2) {
                const double p = mdp.transition(a, s, s2);
                const double f = static_cast<double>(counts[s2]) / n;
                within += std::abs(f - p) <= 3.0 * std::sqrt(p * (1 - p) / n) ? 1 : 0;
                ++total;
            }
        }
    EXPECT_GE(static_cast<double>(within) / total, 0.95);
}

TEST(SampleReward, DeterministicReturnsMeanWithoutDraws) {
    auto mdp = TabularMdp(1, 1, {1.0}, {0.2});
    RngStream rng(3);
    EXPECT_EQ(sample_reward(mdp, 0, 0, rng), 0.2);
    EXPECT_EQ(rng.draws(), 0u);
}

TEST(SampleReward, ZeroVarianceGaussianCollapses) {
    auto mdp = TabularMdp(1, 1, {1.0}, {1.0}, RewardNoiseSpec::gaussian(0.0));
    RngStream rng(3);
    EXPECT_EQ(sample_reward(mdp, 0, 0, rng), 1.0);
    EXPECT_EQ(rng.draws(), 2u);
}

TEST(SampleReward, GaussianMoments) {
    auto mdp = TabularMdp(1, 1, {1.0}, {0.0}, RewardNoiseSpec::gaussian(0.5));
    RngStream rng(8);
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = sample_reward(mdp, 0, 0, rng);
        sum += r;
        sq += r * r;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.0, 0.003);
    EXPECT_NEAR(sq / n - mean * mean, 0.5, 0.01);
}

TEST(SampleReward, ConditionalMeanMatches) {
    RngStream gen(12);
    auto mdp = oracle::random_mdp(3, 2, gen);
    mdp.set_noise(RewardNoiseSpec::gaussian(0.5));
    RngStream rng(13);
    const int n = 200000;
    for (State s = 0; s < 3; ++s)
        for (Action a = 0; a < 2; ++a) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += sample_reward(mdp, s, a, rng);
            EXPECT_NEAR(sum / n, mdp.reward(s, a), 4.0 * std::sqrt(0.5 / n));
        }
}

TEST(Serialization, MdpRoundTripIsExact) {
    RngStream gen(99);
    auto mdp = oracle::random_mdp(4, 3, gen);
    mdp.set_noise(RewardNoiseSpec::gaussian(0.5));
    const auto j = to_json(mdp);
    EXPECT_EQ(j["transitions"].size(), 3u);
    EXPECT_EQ(j["transitions"][0].size(), 4u);
    EXPECT_EQ(j["mean_rewards"].size(), 4u);
    EXPECT_EQ(j["noise"]["kind"], "gaussian");
    const auto back = mdp_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back, mdp);
}

TEST(Serialization, MalformedMdpRejected) {
    auto j = to_json(single_state(1.0));
    j["transitions"] = Json::array({Json::array({Json::array({0.5, 0.5})})});
    EXPECT_THROW(mdp_from_json(j), std::invalid_argument);
}
