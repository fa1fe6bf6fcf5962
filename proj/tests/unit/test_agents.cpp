#include <gtest/gtest.h>

#include <numeric>

#include "lookahead/agents/factory.hpp"
#include "lookahead/environments.hpp"
#include "lookahead/planning.hpp"
#include "lookahead/simulate.hpp"
#include "oracles.hpp"

using namespace lookahead;

namespace {

LgktConfig lgkt_config(std::size_t k, double gamma, ExplorationMode mode = ExplorationMode::ucb_index) {
    LgktConfig c;
    c.k = k;
    c.gamma = gamma;
    c.mode = mode;
    return c;
}

std::uint64_t total_visits(const LcbState& st) {
    std::uint64_t n = 0;
    for (State s = 0; s < st.num_states(); ++s)
        for (Action a = 0; a < st.num_actions(); ++a) n += st.n(s, a);
    return n;
}

/// Steps one transition of `mdp` by hand with the same draw order as simulate().
EnvStep env_step(const TabularMdp& mdp, RngStream& rng, State s, Action a) {
    const double r = sample_reward(mdp, s, a, rng);
    return {r, sample_transition(mdp, s, a, rng)};
}

}  // namespace

TEST(Lg1t, FirstStepExploresThenExploitsCertifiedArm) {
    const auto mdp = TabularMdp(1, 2, {1.0, 1.0}, {0.9, 0.0});
    Lg1tAgent agent(1, 2, 2000, {0.3, ExplorationMode::ucb_index}, RngStream(1));
    const auto run = simulate(mdp, agent, 2000, 0, RngStream(2));
    EXPECT_EQ(run.steps.front().phase, Phase::explore);
    EXPECT_EQ(run.steps.back().phase, Phase::exploit);
    EXPECT_EQ(run.steps.back().a, 0u);
    EXPECT_EQ(agent.steps_consumed(), 2001u);
    EXPECT_EQ(total_visits(agent.stats()), 2001u);
}

TEST(Lg1t, CertifiedChoiceUsesNoRandomness) {
    const auto mdp = TabularMdp(1, 1, {1.0}, {1.0});
    Lg1tAgent agent(1, 1, 100, {0.3, ExplorationMode::uniform}, RngStream(1));
    simulate(mdp, agent, 100, 0, RngStream(2));
    // The arm becomes certified after a few pulls; from then on no draws.
    const auto draws = agent.rng().draws();
    EXPECT_LT(draws, 10u);
}

TEST(Lgkt, ConfigValidation) {
    EXPECT_THROW(LgktAgent(2, 2, 10, lgkt_config(1, 0.5), RngStream(1)), std::invalid_argument);
    auto c = lgkt_config(2, 0.5);
    c.p = 0.0;
    EXPECT_THROW(LgktAgent(2, 2, 10, c, RngStream(1)), std::invalid_argument);
    c = lgkt_config(2, 0.5);
    c.eta = 0.0;
    EXPECT_THROW(LgktAgent(2, 2, 10, c, RngStream(1)), std::invalid_argument);
}

TEST(Lgkt, FirstDecisionExplores) {
    RngStream gen(3);
    const auto mdp = oracle::random_mdp(3, 2, gen);
    LgktAgent agent(3, 2, 50, lgkt_config(3, 0.5), RngStream(4));
    agent.select_action(0, 0);
    EXPECT_EQ(agent.phase(), Phase::subroutine);
    EXPECT_EQ(agent.explorations_started(), 1u);
}

TEST(Lgkt, EpsilonFollowsPreviousVisitCount) {
    RngStream gen(5);
    const auto mdp = oracle::random_mdp(3, 2, gen);
    LgktAgent agent(3, 2, 500, lgkt_config(2, 0.5), RngStream(6));
    simulate(mdp, agent, 500, 0, RngStream(7), {}, [&](const StepRecord& step, const Agent&) {
        if (agent.in_rollout()) return;
        EXPECT_DOUBLE_EQ(agent.current_epsilon(),
                         exploration_probability(agent.stats().n(step.s, step.a), 0.5, 0.5));
    });
}

class LgktAccounting : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t, ExplorationMode>> {};

TEST_P(LgktAccounting, StepsAddUp) {
    const auto [k, T, mode] = GetParam();
    RngStream gen(11);
    const auto mdp = oracle::random_mdp(4, 3, gen);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        LgktAgent agent(4, 3, T, lgkt_config(k, 0.9, mode), RngStream(seed));
        const auto run = simulate(mdp, agent, T, 0, RngStream(100 + seed));
        ASSERT_TRUE(run.well_formed());
        EXPECT_EQ(agent.exploit_steps() + (k - 1) * agent.completed_explorations() + agent.truncated_steps(), T + 1);
        EXPECT_EQ(agent.steps_consumed(), T + 1);
        // Every step, rollout or not, feeds the one-step statistics.
        EXPECT_EQ(total_visits(agent.stats()), T + 1);
        std::uint64_t continuation = 0;
        for (State s = 0; s < 4; ++s)
            for (Action a = 0; a < 3; ++a) continuation += agent.stats().n_km1(s, a);
        EXPECT_EQ(continuation, agent.continuation_samples());
        EXPECT_LE(agent.continuation_samples(), agent.completed_explorations());
        const auto subroutine = std::count_if(run.steps.begin(), run.steps.end(),
                                              [](const StepRecord& r) { return r.phase == Phase::subroutine; });
        EXPECT_EQ(static_cast<std::uint64_t>(subroutine), T + 1 - agent.exploit_steps());
    }
}

INSTANTIATE_TEST_SUITE_P(Shapes, LgktAccounting,
                         ::testing::Values(std::tuple{std::size_t{2}, std::size_t{300}, ExplorationMode::ucb_index},
                                           std::tuple{std::size_t{3}, std::size_t{301}, ExplorationMode::uniform},
                                           std::tuple{std::size_t{4}, std::size_t{2}, ExplorationMode::uniform},
                                           std::tuple{std::size_t{5}, std::size_t{1000}, ExplorationMode::ucb_index}));

TEST(EstimateRkm1, DepthTwoTakesOneStep) {
    UcbSubroutine sampler(2, 2);
    LcbState stats(2, 2, 2);
    const auto result = estimate_r_km1(sampler, stats, StateAction{0, 1}, 1, 0, 10, 2,
                                       [](State, Action) { return EnvStep{0.4, 0}; });
    EXPECT_EQ(result.steps, 1u);
    EXPECT_EQ(result.outcome, EstimationRollout::Outcome::completed);
    EXPECT_EQ(stats.n_km1(0, 1), 1u);
    EXPECT_DOUBLE_EQ(stats.phi_km1(0, 1), 0.4);
    EXPECT_EQ(stats.n(1, 0), 1u);
    EXPECT_EQ(stats.n(0, 1), 0u);
}

TEST(EstimateRkm1, SumsRolloutRewards) {
    UcbSubroutine sampler(3, 1);
    LcbState stats(3, 1, 3);
    const double rewards[3] = {0.0, 0.2, 0.3};
    const auto result = estimate_r_km1(sampler, stats, StateAction{0, 0}, 1, 0, 10, 3,
                                       [&](State s, Action) { return EnvStep{rewards[s], s == 1 ? 2u : 0u}; });
    EXPECT_EQ(result.steps, 2u);
    EXPECT_DOUBLE_EQ(stats.phi_km1(0, 0), 0.5);
    EXPECT_EQ(stats.n_km1(0, 0), 1u);
    EXPECT_DOUBLE_EQ(stats.phi1(1, 0), 0.2);
    EXPECT_DOUBLE_EQ(stats.phi1(2, 0), 0.3);
}

TEST(EstimateRkm1, TruncatedAtHorizonRecordsNoSample) {
    UcbSubroutine sampler(1, 1);
    LcbState stats(1, 1, 4);
    const auto result = estimate_r_km1(sampler, stats, StateAction{0, 0}, 0, 9, 10, 4,
                                       [](State, Action) { return EnvStep{1.0, 0}; });
    EXPECT_EQ(result.outcome, EstimationRollout::Outcome::truncated);
    EXPECT_EQ(result.steps, 2u);
    EXPECT_EQ(stats.n_km1(0, 0), 0u);
    EXPECT_EQ(stats.n(0, 0), 2u);
}

TEST(EstimateRkm1, NoReferenceRecordsNoSample) {
    UcbSubroutine sampler(1, 1);
    LcbState stats(1, 1, 2);
    estimate_r_km1(sampler, stats, std::nullopt, 0, 0, 10, 2, [](State, Action) { return EnvStep{1.0, 0}; });
    EXPECT_EQ(stats.n_km1(0, 0), 0u);
    EXPECT_EQ(stats.n(0, 0), 1u);
}

TEST(EstimateRkm1, ContinuationMeanConvergesUnderUcb) {
    // Reference (0, 0) moves to state 1 w.p. 0.3 and state 2 w.p. 0.7; both
    // have a clearly better second action.
    auto mdp = TabularMdp::zeros(3, 2, RewardNoiseSpec::gaussian(0.1));
    for (Action a = 0; a < 2; ++a)
        for (State s = 0; s < 3; ++s) {
            mdp.transition(a, s, 1) = 0.3;
            mdp.transition(a, s, 2) = 0.7;
        }
    mdp.reward(1, 0) = 0.2;
    mdp.reward(1, 1) = 0.8;
    mdp.reward(2, 0) = 0.6;
    mdp.reward(2, 1) = 0.1;
    const auto table = k_step_rewards(mdp, 1);
    double target = 0.0;
    for (State s2 = 0; s2 < 3; ++s2) {
        const auto row = table.row(1, s2);
        target += mdp.transition(0, 0, s2) * *std::max_element(row.begin(), row.end());
    }
    UcbSubroutine sampler(3, 2);
    LcbState stats(3, 2, 2);
    RngStream rng(13);
    for (int i = 0; i < 10000; ++i) {
        const State start = sample_transition(mdp, 0, 0, rng);
        estimate_r_km1(sampler, stats, StateAction{0, 0}, start, 0, 100, 2,
                       [&](State s, Action a) { return env_step(mdp, rng, s, a); });
    }
    EXPECT_NEAR(stats.mean_km1(0, 0), target, 0.02);
}

TEST(Lg12t, FullHeadMatchesPureLg1t) {
    RngStream gen(21);
    const auto mdp = oracle::random_mdp(4, 3, gen);
    const std::size_t T = 400;
    Lg1tConfig head{0.3, ExplorationMode::uniform};
    Lg12tAgent hybrid(4, 3, T, static_cast<std::int64_t>(T), head, lgkt_config(2, 0.9), RngStream(5));
    Lg1tAgent pure(4, 3, T, head, RngStream(5));
    const auto a = simulate(mdp, hybrid, T, 0, RngStream(6));
    const auto b = simulate(mdp, pure, T, 0, RngStream(6));
    EXPECT_EQ(a.steps, b.steps);
    EXPECT_FALSE(hybrid.switched());
}

TEST(Lg12t, SwitchAfterFirstStepMatchesWarmStartedLgkt) {
    RngStream gen(22);
    const auto mdp = oracle::random_mdp(4, 3, gen);
    const std::size_t T = 400;
    const Lg1tConfig head{0.3, ExplorationMode::uniform};
    const auto tail_cfg = lgkt_config(2, 0.9, ExplorationMode::uniform);
    Lg12tAgent hybrid(4, 3, T, 0, head, tail_cfg, RngStream(7));
    const auto run = simulate(mdp, hybrid, T, 0, RngStream(8));
    EXPECT_TRUE(hybrid.switched());

    RngStream env(8);
    Lg1tAgent first(4, 3, T, head, RngStream(7));
    const Action a0 = first.select_action(0, 0);
    const auto step0 = env_step(mdp, env, 0, a0);
    first.observe(0, a0, step0.reward, step0.next, 0);
    ASSERT_EQ(run.steps[0].a, a0);
    LgktAgent tail(4, 3, T, tail_cfg, std::move(first.rng()), LgktWarmStart{first.stats(), first.previous()});
    State s = step0.next;
    for (std::size_t t = 1; t <= T; ++t) {
        const Action a = tail.select_action(s, t);
        const auto st = env_step(mdp, env, s, a);
        tail.observe(s, a, st.reward, st.next, t);
        ASSERT_EQ(run.steps[t].a, a) << t;
        ASSERT_EQ(run.steps[t].r, st.reward);
        s = st.next;
    }
    EXPECT_EQ(hybrid.tail()->stats(), tail.stats());
}

TEST(Lg12t, NegativeChangeTimeIsPureLgkt) {
    RngStream gen(23);
    const auto mdp = oracle::random_mdp(3, 2, gen);
    const auto cfg = lgkt_config(2, 0.9);
    Lg12tAgent hybrid(3, 2, 200, -1, {}, cfg, RngStream(9));
    LgktAgent pure(3, 2, 200, cfg, RngStream(9));
    EXPECT_EQ(simulate(mdp, hybrid, 200, 0, RngStream(1)).steps, simulate(mdp, pure, 200, 0, RngStream(1)).steps);
}

TEST(Lg12t, RequiresDepthTwoTail) {
    EXPECT_THROW(Lg12tAgent(2, 2, 10, 5, {}, lgkt_config(3, 0.9), RngStream(1)), std::invalid_argument);
}

TEST(Lg1tRl, FullHeadMatchesPureLg1t) {
    const auto mdp = jump_riverswim(4);
    const std::size_t T = 500;
    Lg1tRlAgent hybrid(5, 2, T, static_cast<std::int64_t>(T), {}, std::make_unique<Ucrl2Agent>(5, 2), RngStream(3));
    Lg1tAgent pure(5, 2, T, {}, RngStream(3));
    EXPECT_EQ(simulate(mdp, hybrid, T, 0, RngStream(4)).steps, simulate(mdp, pure, T, 0, RngStream(4)).steps);
}

TEST(Lg1tRl, NegativeChangeTimeIsPureTail) {
    const auto mdp = jump_riverswim(4);
    const std::size_t T = 500;
    Lg1tRlAgent hybrid(5, 2, T, -1, {}, std::make_unique<Ucrl2Agent>(5, 2), RngStream(3));
    Ucrl2Agent pure(5, 2);
    EXPECT_EQ(simulate(mdp, hybrid, T, 0, RngStream(4)).steps, simulate(mdp, pure, T, 0, RngStream(4)).steps);
}

TEST(Lg1tRl, TailSeesHeadTransitions) {
    const auto mdp = jump_riverswim(4);
    const std::size_t T = 500;
    Lg1tRlAgent hybrid(5, 2, T, 0, {}, std::make_unique<Ucrl2Agent>(5, 2), RngStream(3));
    const auto run = simulate(mdp, hybrid, T, 0, RngStream(4));

    RngStream env(4);
    Lg1tAgent first(5, 2, T, {}, RngStream(3));
    const Action a0 = first.select_action(0, 0);
    const auto step0 = env_step(mdp, env, 0, a0);
    Ucrl2Agent tail(5, 2);
    tail.ingest(0, a0, step0.reward, step0.next, 0);
    State s = step0.next;
    for (std::size_t t = 1; t <= T; ++t) {
        const Action a = tail.select_action(s, t);
        const auto st = env_step(mdp, env, s, a);
        tail.observe(s, a, st.reward, st.next, t);
        ASSERT_EQ(run.steps[t].a, a) << t;
        s = st.next;
    }
    EXPECT_EQ(hybrid.steps_consumed(), T + 1);
}

TEST(Factory, EveryAlgorithmIsDeterministic) {
    RngStream gen(31);
    const auto mdp = oracle::random_mdp(4, 3, gen);
    for (const char* algo : {"lg1t", "lgkt", "lg1_2t", "lg1t_rl", "ucrl2", "q_episodic", "q_optimistic"}) {
        AgentConfig cfg;
        cfg.algorithm = algo;
        cfg.k = std::string(algo) == "lgkt" ? 2 : 1;
        cfg.change_time = 50;
        auto a = make_agent(cfg, 4, 3, 300, RngStream(agent_stream(17)));
        auto b = make_agent(cfg, 4, 3, 300, RngStream(agent_stream(17)));
        const auto ra = simulate(mdp, *a, 300, 0, environment_stream(17));
        const auto rb = simulate(mdp, *b, 300, 0, environment_stream(17));
        EXPECT_EQ(ra.steps, rb.steps) << algo;
        EXPECT_EQ(a->steps_consumed(), 301u) << algo;
    }
}

TEST(Factory, RejectsBadConfigs) {
    AgentConfig c;
    c.algorithm = "sarsa";
    EXPECT_THROW(validate(c), std::invalid_argument);
    c.algorithm = "lgkt";
    c.k = 1;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = {};
    c.sub_alg = "thompson";
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = {};
    c.algorithm = "q_optimistic";
    c.discount = 1.0;
    EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Factory, ThresholdingClassification) {
    AgentConfig c;
    for (const char* a : {"lg1t", "lgkt", "lg1_2t", "lg1t_rl"}) {
        c.algorithm = a;
        EXPECT_TRUE(c.is_thresholding());
    }
    for (const char* a : {"ucrl2", "q_episodic", "q_optimistic"}) {
        c.algorithm = a;
        EXPECT_FALSE(c.is_thresholding());
    }
}
