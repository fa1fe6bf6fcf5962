#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lookahead/agents/agent.hpp"
#include "lookahead/agents/lcb.hpp"
#include "lookahead/agents/ucb_subroutine.hpp"
#include "lookahead/threshold.hpp"

namespace lookahead {

using StateAction = std::pair<State, Action>;

/**
 * One run of the (K-1)-step estimation subroutine.
 *
 * Actions come from the UCB sampler keyed by the reference pair (the step
 * before the rollout). Every step also feeds the main one-step statistics.
 * After K-1 steps the summed reward becomes one continuation sample for the
 * reference pair. A rollout cut short by the end of the horizon, or one
 * without a reference pair, contributes no continuation sample.
 */
class EstimationRollout {
public:
    enum class Outcome { running, completed, truncated };

    void begin(std::optional<StateAction> reference, std::size_t length) {
        if (length == 0) throw std::invalid_argument("EstimationRollout: zero-length rollout");
        reference_ = reference;
        length_ = length;
        depth_ = 0;
        sum_ = 0.0;
        active_ = true;
    }

    bool active() const noexcept { return active_; }
    std::size_t depth() const noexcept { return depth_; }
    double reward_sum() const noexcept { return sum_; }
    const std::optional<StateAction>& reference() const noexcept { return reference_; }

    Action next_action(const UcbSubroutine& sampler, State s) const { return sampler.select(key(sampler), depth_, s); }

    /// Folds one observed step in. `last_step` marks the final step of the horizon.
    Outcome record(UcbSubroutine& sampler, LcbState& stats, State s, Action a, double r, bool last_step) {
        sampler.update(key(sampler), depth_, s, a, r);
        stats.record_reward(s, a, r);
        sum_ += r;
        ++depth_;
        if (depth_ == length_) {
            active_ = false;
            if (reference_) stats.record_continuation(reference_->first, reference_->second, sum_);
            return Outcome::completed;
        }
        if (last_step) {
            active_ = false;
            return Outcome::truncated;
        }
        return Outcome::running;
    }

private:
    std::uint64_t key(const UcbSubroutine& sampler) const {
        return reference_ ? sampler.reference(reference_->first, reference_->second) : sampler.no_reference();
    }

    std::optional<StateAction> reference_;
    std::size_t length_ = 1;
    std::size_t depth_ = 0;
    double sum_ = 0.0;
    bool active_ = false;
};

struct EnvStep {
    double reward;
    State next;
};

struct EstimateResult {
    EstimationRollout::Outcome outcome;
    std::size_t steps = 0;
    double reward_sum = 0.0;
    State final_state = 0;
};

/// Runs the estimation subroutine to completion against `env_step`, starting
/// at state `start` at time t of a horizon-T run.
inline EstimateResult estimate_r_km1(UcbSubroutine& sampler, LcbState& stats, std::optional<StateAction> reference,
                                     State start, std::size_t t, std::size_t horizon, std::size_t k,
                                     const std::function<EnvStep(State, Action)>& env_step) {
    if (k < 2) throw std::invalid_argument("estimate_r_km1: K must be at least 2");
    EstimationRollout rollout;
    rollout.begin(reference, k - 1);
    EstimateResult out{EstimationRollout::Outcome::running, 0, 0.0, start};
    State s = start;
    for (std::size_t step = t; rollout.active(); ++step) {
        const Action a = rollout.next_action(sampler, s);
        const auto [r, next] = env_step(s, a);
        out.outcome = rollout.record(sampler, stats, s, a, r, step >= horizon);
        ++out.steps;
        s = next;
    }
    out.reward_sum = rollout.reward_sum();
    out.final_state = s;
    return out;
}

struct LgktConfig {
    std::size_t k = 2;
    ThresholdSchedule gamma{0.9};
    double eta = 0.5;
    double p = 0.5;
    ExplorationMode mode = ExplorationMode::ucb_index;

    void validate() const {
        if (k < 2 || k > 64) throw std::invalid_argument("LgktConfig: K must be in [2, 64]");
        if (!(eta > 0.0)) throw std::invalid_argument("LgktConfig: eta must be positive");
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("LgktConfig: p must be in (0, 1]");
    }
};

/// Statistics handed over when LGKT takes over from another learner.
struct LgktWarmStart {
    LcbState stats;
    std::optional<StateAction> previous;
};

/**
 * LCB-guided K-step thresholding.
 *
 * Each decision first picks the tentative thresholding action from the
 * two-term bounds, then flips the exploration coin with probability
 * eps_t keyed on the previous step's visit count (eps_0 = 1). Heads starts an
 * estimation rollout and the tentative action is dropped.
 */
class LgktAgent : public Agent {
public:
    LgktAgent(std::size_t num_states, std::size_t num_actions, std::size_t horizon, LgktConfig config,
              RngStream rng, std::optional<LgktWarmStart> warm = std::nullopt)
        : horizon_(horizon),
          config_(std::move(config)),
          rng_(std::move(rng)),
          stats_(num_states, num_actions, config_.k),
          sampler_(num_states, num_actions),
          lcb_row_(num_actions),
          index_row_(num_actions) {
        config_.validate();
        if (warm) {
            if (warm->stats.num_states() != num_states || warm->stats.num_actions() != num_actions)
                throw std::invalid_argument("LgktAgent: warm-start statistics have the wrong shape");
            stats_ = LcbState::warm_start(warm->stats, config_.k);
            previous_ = warm->previous;
        }
    }

    Action select_action(State s, std::size_t t) override {
        if (rollout_.active()) {
            phase_ = Phase::subroutine;
            return rollout_.next_action(sampler_, s);
        }
        const auto A = stats_.num_actions();
        for (Action a = 0; a < A; ++a) {
            lcb_row_[a] = stats_.lcb(s, a);
            if (config_.mode == ExplorationMode::ucb_index)
                index_row_[a] = ucb_index(stats_.mean_k(s, a), stats_.n(s, a), horizon_);
        }
        const auto tentative = threshold_select(lcb_row_, config_.gamma.at(t), rng_, config_.mode, index_row_);
        const double eps = previous_ ? current_epsilon() : 1.0;
        if (rng_.uniform() < eps) {
            rollout_.begin(previous_, config_.k - 1);
            ++explorations_started_;
            phase_ = Phase::subroutine;
            return rollout_.next_action(sampler_, s);
        }
        phase_ = tentative.certified ? Phase::exploit : Phase::explore;
        return tentative.action;
    }

    void observe(State s, Action a, double r, State /*next*/, std::size_t t) override {
        ++steps_;
        if (rollout_.active()) {
            const auto before = rollout_.depth();
            switch (rollout_.record(sampler_, stats_, s, a, r, t >= horizon_)) {
                case EstimationRollout::Outcome::completed:
                    ++completed_explorations_;
                    if (rollout_.reference()) ++continuation_samples_;
                    break;
                case EstimationRollout::Outcome::truncated:
                    truncated_steps_ += before + 1;
                    break;
                case EstimationRollout::Outcome::running: break;
            }
        } else {
            stats_.record_reward(s, a, r);
            ++exploit_steps_;
        }
        previous_ = StateAction{s, a};
    }

    std::uint64_t steps_consumed() const override { return steps_; }
    Phase phase() const override { return phase_; }
    std::string name() const override { return "lgkt"; }

    double current_epsilon() const {
        const auto n = previous_ ? stats_.n(previous_->first, previous_->second) : 0;
        return exploration_probability(n, config_.p, config_.eta);
    }

    const LcbState& stats() const noexcept { return stats_; }
    const UcbSubroutine& sampler() const noexcept { return sampler_; }
    const LgktConfig& config() const noexcept { return config_; }
    bool in_rollout() const noexcept { return rollout_.active(); }

    std::uint64_t exploit_steps() const noexcept { return exploit_steps_; }
    std::uint64_t completed_explorations() const noexcept { return completed_explorations_; }
    std::uint64_t explorations_started() const noexcept { return explorations_started_; }
    std::uint64_t continuation_samples() const noexcept { return continuation_samples_; }
    std::uint64_t truncated_steps() const noexcept { return truncated_steps_; }

private:
    std::size_t horizon_;
    LgktConfig config_;
    RngStream rng_;
    LcbState stats_;
    UcbSubroutine sampler_;
    EstimationRollout rollout_;
    std::optional<StateAction> previous_;
    std::vector<double> lcb_row_;
    std::vector<double> index_row_;
    Phase phase_ = Phase::subroutine;
    std::uint64_t steps_ = 0;
    std::uint64_t exploit_steps_ = 0;
    std::uint64_t completed_explorations_ = 0;
    std::uint64_t explorations_started_ = 0;
    std::uint64_t continuation_samples_ = 0;
    std::uint64_t truncated_steps_ = 0;
};

}  // namespace lookahead
