#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lookahead/agents/agent.hpp"
#include "lookahead/mdp.hpp"
#include "lookahead/rng.hpp"
#include "lookahead/threshold.hpp"

namespace lookahead {

struct RunMeta {
    std::string algorithm;
    std::string environment;
    std::uint64_t seed = 0;
    std::size_t horizon = 0;
    std::size_t k = 1;
    ThresholdSchedule gamma{0.0};
};

struct StepRecord {
    std::size_t t = 0;
    State s = 0;
    Action a = 0;
    double r = 0.0;
    Phase phase = Phase::exploit;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Realized trajectory of one run: exactly T + 1 steps, t = 0..T.
struct RunRecord {
    RunMeta meta;
    std::vector<StepRecord> steps;

    bool well_formed() const {
        if (steps.size() != meta.horizon + 1) return false;
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (steps[i].t != i) return false;
        return true;
    }
};

using StepObserver = std::function<void(const StepRecord&, const Agent&)>;

/// Environment stream and agent stream for one run seed.
inline RngStream environment_stream(std::uint64_t run_seed) { return RngStream(derive_seed(run_seed, 0)); }
inline RngStream agent_stream(std::uint64_t run_seed) { return RngStream(derive_seed(run_seed, 1)); }

/**
 * Plays `agent` against `mdp` for decisions t = 0..T from state s0.
 *
 * Per step the reward is drawn before the next state. `on_step`, if set, sees
 * each completed step together with the agent after its update.
 */
inline RunRecord simulate(const TabularMdp& mdp, Agent& agent, std::size_t horizon, State s0, RngStream env_rng,
                          RunMeta meta = {}, const StepObserver& on_step = {}) {
    meta.horizon = horizon;
    RunRecord run{std::move(meta), {}};
    run.steps.reserve(horizon + 1);
    State s = s0;
    for (std::size_t t = 0; t <= horizon; ++t) {
        const Action a = agent.select_action(s, t);
        const Phase phase = agent.phase();
        const double r = sample_reward(mdp, s, a, env_rng);
        const State next = sample_transition(mdp, s, a, env_rng);
        agent.observe(s, a, r, next, t);
        run.steps.push_back({t, s, a, r, phase});
        if (on_step) on_step(run.steps.back(), agent);
        s = next;
    }
    return run;
}

}  // namespace lookahead
