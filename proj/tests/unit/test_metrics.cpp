#include <gtest/gtest.h>

#include "lookahead/agents/lg1t.hpp"
#include "lookahead/environments.hpp"
#include "lookahead/metrics.hpp"
#include "oracles.hpp"

using namespace lookahead;

namespace {

TabularMdp bandit(std::vector<double> means, double variance) {
    const std::size_t A = means.size();
    return TabularMdp(1, A, std::vector<double>(A, 1.0), std::move(means), RewardNoiseSpec::gaussian(variance));
}

/// Plays a fixed oracle policy, sampling from its action distribution.
class PolicyAgent : public Agent {
public:
    PolicyAgent(PolicySpec policy, RngStream rng) : policy_(std::move(policy)), rng_(std::move(rng)) {}
    Action select_action(State s, std::size_t t) override {
        if (policy_.kind == PolicyKind::deterministic || policy_.set_size(t, s) == 0) return policy_.action(t, s);
        auto pick = rng_.uniform_index(policy_.set_size(t, s));
        for (Action a = 0;; ++a)
            if (policy_.in_set(t, s, a) && pick-- == 0) return a;
    }
    void observe(State, Action, double, State, std::size_t) override { ++steps_; }
    std::uint64_t steps_consumed() const override { return steps_; }
    std::string name() const override { return "policy"; }

private:
    PolicySpec policy_;
    RngStream rng_;
    std::uint64_t steps_ = 0;
};

RunRecord make_run(std::vector<StepRecord> steps) {
    RunRecord run;
    run.meta.horizon = steps.size() - 1;
    run.steps = std::move(steps);
    return run;
}

}  // namespace

TEST(StepCost, Examples) {
    const auto table = k_step_rewards(TabularMdp(1, 2, {1.0, 1.0}, {0.5, 0.1}), 1);
    EXPECT_EQ(step_cost(table, 0.3, 0, 0, 0, 10, 1), 0.0);
    EXPECT_DOUBLE_EQ(step_cost(table, 0.3, 0, 1, 0, 10, 1), 0.2);
}

TEST(StepCost, LastStepUsesOneStepReward) {
    const auto mdp = TabularMdp(1, 1, {1.0}, {0.25});
    const auto table = k_step_rewards(mdp, 3);
    EXPECT_EQ(step_cost(table, 0.5, 0, 0, 10, 10, 3), 0.25);
    EXPECT_EQ(step_cost(table, 0.5, 0, 0, 9, 10, 3), 0.0);  // r^2 = 0.5
    EXPECT_THROW(step_cost(k_step_rewards(mdp, 1), 0.5, 0, 0, 0, 10, 3), std::invalid_argument);
}

TEST(RegretTrace, ZeroWhenAlwaysGood) {
    const auto table = k_step_rewards(TabularMdp(1, 2, {1.0, 1.0}, {0.5, 0.1}), 1);
    const auto run = make_run({{0, 0, 0, 0.5}, {1, 0, 0, 0.5}, {2, 0, 0, 0.5}});
    for (double c : regret_trace(run, table, 0.3, 1)) EXPECT_EQ(c, 0.0);
}

TEST(RegretTrace, NondecreasingPrefixSums) {
    RngStream gen(3);
    const auto mdp = oracle::random_mdp(4, 3, gen);
    const auto table = k_step_rewards(mdp, 2);
    Lg1tAgent agent(4, 3, 500, {0.6, ExplorationMode::uniform}, RngStream(4));
    const auto run = simulate(mdp, agent, 500, 0, RngStream(5));
    const auto trace = regret_trace(run, table, 0.6, 2);
    const auto costs = step_costs(run, table, {{2, 0.6}});
    double sum = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        ASSERT_GE(costs[i], 0.0);
        sum += costs[i];
        ASSERT_EQ(trace[i], sum);
        if (i > 0) {
            ASSERT_GE(trace[i], trace[i - 1]);
        }
    }
}

TEST(RegretTrace, SegmentsSwitchTargets) {
    const auto table = k_step_rewards(TabularMdp(1, 2, {1.0, 1.0}, {0.5, 0.1}), 2);
    const auto run = make_run({{0, 0, 1, 0.1}, {1, 0, 1, 0.1}, {2, 0, 1, 0.1}, {3, 0, 1, 0.1}});
    // r^1 = 0.1 and r^2 = 0.6 for action 1.
    const std::vector<RegretSegment> segments{{1, 0.3, 1}, {2, 0.3}};
    const auto costs = step_costs(run, table, segments);
    EXPECT_DOUBLE_EQ(costs[0], 0.2);
    EXPECT_DOUBLE_EQ(costs[1], 0.2);
    EXPECT_EQ(costs[2], 0.0);
    EXPECT_DOUBLE_EQ(costs[3], 0.2);  // last decision falls back to depth 1
}

TEST(RegretTrace, ThresholdingOracleHasZeroRegret) {
    RngStream gen(11);
    const auto mdp = oracle::random_mdp(5, 3, gen);
    const std::size_t T = 2000;
    for (std::size_t K : {1, 2}) {
        const auto table = k_step_rewards(mdp, K);
        // Largest constant threshold under which every state keeps a good action.
        double gamma = std::numeric_limits<double>::infinity();
        for (std::size_t d = 1; d <= K; ++d)
            for (State s = 0; s < 5; ++s) {
                const auto row = table.row(d, s);
                gamma = std::min(gamma, *std::max_element(row.begin(), row.end()));
            }
        ASSERT_TRUE(check_good_action(table, gamma, K, T).holds);
        PolicyAgent agent(thresholding_policy(mdp, K, gamma, T), RngStream(2));
        const auto run = simulate(mdp, agent, T, 0, RngStream(3));
        EXPECT_EQ(regret_trace(run, table, gamma, K).back(), 0.0);
    }
}

TEST(RunningAverage, Examples) {
    const auto ones = make_run({{0, 0, 0, 1.0}, {1, 0, 0, 1.0}, {2, 0, 0, 1.0}});
    for (double v : running_average(ones)) EXPECT_EQ(v, 1.0);
    const auto alt = running_average(make_run({{0, 0, 0, 1.0}, {1, 0, 0, 0.0}}));
    EXPECT_EQ(alt, (std::vector<double>{1.0, 0.5}));
}

TEST(RunningAverage, MatchesRecomputation) {
    RngStream gen(7);
    auto mdp = oracle::random_mdp(3, 2, gen);
    mdp.set_noise(RewardNoiseSpec::gaussian(0.5));
    Lg1tAgent agent(3, 2, 300, {}, RngStream(8));
    const auto run = simulate(mdp, agent, 300, 0, RngStream(9));
    const auto avg = running_average(run);
    for (std::size_t t = 0; t <= 300; t += 37) {
        double sum = 0.0;
        for (std::size_t j = 0; j <= t; ++j) sum += run.steps[j].r;
        EXPECT_NEAR(avg[t], sum / static_cast<double>(t + 1), 1e-12);
    }
    EXPECT_NEAR(cumulative_reward(run), avg.back() * 301.0, 1e-9);
}

TEST(GapStats, BanditExample) {
    const auto table = k_step_rewards(bandit({0.5, 0.31, 0.1}, 0.0), 1);
    const auto g = gap_stats(table, 0.3, 1, 100);
    EXPECT_NEAR(g.delta_k, 0.01, 1e-12);
    EXPECT_NEAR(g.delta_k_plus, 0.01, 1e-12);
    EXPECT_FALSE(g.degenerate);
    EXPECT_NEAR(g.gap(0, 0, 2), 0.2, 1e-12);
    EXPECT_LE(g.delta_k, g.delta_k_plus);
}

TEST(GapStats, AllAboveThreshold) {
    const auto table = k_step_rewards(bandit({0.5, 0.31, 0.4}, 0.0), 1);
    const auto g = gap_stats(table, 0.1, 1, 100);
    EXPECT_NEAR(g.delta_k_plus, 0.21, 1e-12);
    EXPECT_EQ(g.delta_k, g.delta_k_plus);
}

TEST(GapStats, DegenerateAndPerStep) {
    const auto table = k_step_rewards(bandit({0.5, 0.3}, 0.0), 1);
    EXPECT_TRUE(gap_stats(table, 0.3, 1, 10).degenerate);
    const ThresholdSchedule sched(std::vector<double>{0.1, 0.2, 0.6});
    const auto g = gap_stats(table, sched, 1, 2);
    EXPECT_TRUE(g.per_step);
    EXPECT_NEAR(g.gap(2, 0, 0), 0.1, 1e-12);
    EXPECT_NEAR(g.delta_k, 0.1, 1e-12);
    EXPECT_NEAR(g.delta_k_plus, 0.1, 1e-12);
    EXPECT_THROW(gap_stats(table, sched, 1, 5), std::invalid_argument);
}

TEST(GoodAction, RiverSwimViolation) {
    const auto table = k_step_rewards(jump_riverswim(4), 1);
    const auto check = check_good_action(table, 0.3, 1, 100);
    EXPECT_FALSE(check.holds);
    EXPECT_EQ(check.violations, 101u * 4u);
    ASSERT_TRUE(check.witness.has_value());
    EXPECT_EQ(check.witness->first, 0u);
    EXPECT_EQ(check.witness->second, 0u);
    EXPECT_TRUE(check_good_action(table, 0.3, 1, 100, 5, 4).holds);  // empty window
}

TEST(StraightLine, Lg1tMatchesIndependentReimplementation) {
    const std::vector<double> mu{0.5, 0.31, 0.1};
    const double gamma = 0.3, variance = 0.5;
    const std::size_t T = 20000;
    const int seeds = 200;
    const auto mdp = bandit(mu, variance);
    const auto table = k_step_rewards(mdp, 1);
    double library = 0.0, reference = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
        Lg1tAgent agent(1, 3, T, {gamma, ExplorationMode::uniform}, agent_stream(seed));
        const auto run = simulate(mdp, agent, T, 0, environment_stream(seed));
        library += regret_trace(run, table, gamma, 1).back();
        reference += oracle::straight_line_lg1t_regret(mu, gamma, variance, T, 1000 + seed);
    }
    EXPECT_NEAR(library / reference, 1.0, 0.10) << library / seeds << " vs " << reference / seeds;
}
