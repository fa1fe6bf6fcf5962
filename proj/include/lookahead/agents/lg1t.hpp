#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lookahead/agents/agent.hpp"
#include "lookahead/agents/lcb.hpp"
#include "lookahead/threshold.hpp"

namespace lookahead {

struct Lg1tConfig {
    ThresholdSchedule gamma{0.3};
    ExplorationMode mode = ExplorationMode::ucb_index;
};

/// LCB-guided 1-step thresholding.
class Lg1tAgent : public Agent {
public:
    Lg1tAgent(std::size_t num_states, std::size_t num_actions, std::size_t horizon, Lg1tConfig config,
              RngStream rng)
        : horizon_(horizon),
          config_(std::move(config)),
          rng_(std::move(rng)),
          stats_(num_states, num_actions, 1),
          lcb_row_(num_actions),
          index_row_(num_actions) {}

    Action select_action(State s, std::size_t t) override {
        const auto A = stats_.num_actions();
        for (Action a = 0; a < A; ++a) {
            lcb_row_[a] = stats_.lcb(s, a);
            if (config_.mode == ExplorationMode::ucb_index)
                index_row_[a] = ucb_index(stats_.mean1(s, a), stats_.n(s, a), horizon_);
        }
        const auto choice = threshold_select(lcb_row_, config_.gamma.at(t), rng_, config_.mode, index_row_);
        phase_ = choice.certified ? Phase::exploit : Phase::explore;
        return choice.action;
    }

    void observe(State s, Action a, double r, State /*next*/, std::size_t /*t*/) override {
        stats_.record_reward(s, a, r);
        ++steps_;
        previous_ = {s, a};
        has_previous_ = true;
    }

    std::uint64_t steps_consumed() const override { return steps_; }
    Phase phase() const override { return phase_; }
    std::string name() const override { return "lg1t"; }

    const LcbState& stats() const noexcept { return stats_; }
    const Lg1tConfig& config() const noexcept { return config_; }
    RngStream& rng() noexcept { return rng_; }
    bool has_previous() const noexcept { return has_previous_; }
    std::pair<State, Action> previous() const noexcept { return previous_; }

private:
    std::size_t horizon_;
    Lg1tConfig config_;
    RngStream rng_;
    LcbState stats_;
    std::vector<double> lcb_row_;
    std::vector<double> index_row_;
    std::uint64_t steps_ = 0;
    Phase phase_ = Phase::explore;
    std::pair<State, Action> previous_{0, 0};
    bool has_previous_ = false;
};

}  // namespace lookahead
