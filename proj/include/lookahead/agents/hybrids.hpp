#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "lookahead/agents/agent.hpp"
#include "lookahead/agents/lg1t.hpp"
#include "lookahead/agents/lgkt.hpp"

namespace lookahead {

/**
 * LG1T until the change time, then LGKT with K = 2.
 *
 * At the switch the LGKT learner inherits the one-step statistics, the last
 * (state, action) and the random stream of the LG1T learner. Its
 * continuation statistics start empty. A negative change time skips the LG1T
 * phase entirely.
 */
class Lg12tAgent : public Agent {
public:
    Lg12tAgent(std::size_t num_states, std::size_t num_actions, std::size_t horizon, std::int64_t change_time,
               Lg1tConfig head_config, LgktConfig tail_config, RngStream rng)
        : num_states_(num_states),
          num_actions_(num_actions),
          horizon_(horizon),
          change_time_(change_time),
          tail_config_(std::move(tail_config)) {
        if (tail_config_.k != 2) throw std::invalid_argument("Lg12tAgent: the tail learner must use K = 2");
        tail_config_.validate();
        if (change_time_ < 0)
            tail_.emplace(num_states_, num_actions_, horizon_, tail_config_, std::move(rng));
        else
            head_.emplace(num_states_, num_actions_, horizon_, std::move(head_config), std::move(rng));
    }

    Action select_action(State s, std::size_t t) override {
        if (!tail_ && static_cast<std::int64_t>(t) > change_time_) switch_over();
        return tail_ ? tail_->select_action(s, t) : head_->select_action(s, t);
    }

    void observe(State s, Action a, double r, State next, std::size_t t) override {
        if (tail_)
            tail_->observe(s, a, r, next, t);
        else
            head_->observe(s, a, r, next, t);
    }

    std::uint64_t steps_consumed() const override {
        return (head_ ? head_->steps_consumed() : head_steps_) + (tail_ ? tail_->steps_consumed() : 0);
    }
    Phase phase() const override { return tail_ ? tail_->phase() : head_->phase(); }
    std::string name() const override { return "lg1_2t"; }

    bool switched() const noexcept { return tail_.has_value(); }
    const LgktAgent* tail() const noexcept { return tail_ ? &*tail_ : nullptr; }
    const Lg1tAgent* head() const noexcept { return head_ ? &*head_ : nullptr; }

private:
    void switch_over() {
        LgktWarmStart warm{head_->stats(), std::nullopt};
        if (head_->has_previous()) warm.previous = head_->previous();
        head_steps_ = head_->steps_consumed();
        tail_.emplace(num_states_, num_actions_, horizon_, tail_config_, std::move(head_->rng()), std::move(warm));
        head_.reset();
    }

    std::size_t num_states_;
    std::size_t num_actions_;
    std::size_t horizon_;
    std::int64_t change_time_;
    LgktConfig tail_config_;
    std::optional<Lg1tAgent> head_;
    std::optional<LgktAgent> tail_;
    std::uint64_t head_steps_ = 0;
};

/**
 * LG1T until the change time, then a model-based tail learner.
 *
 * The tail sees every transition of the LG1T phase through ingest(), so it
 * starts with the full count history.
 */
class Lg1tRlAgent : public Agent {
public:
    Lg1tRlAgent(std::size_t num_states, std::size_t num_actions, std::size_t horizon, std::int64_t change_time,
                Lg1tConfig head_config, std::unique_ptr<Agent> tail, RngStream rng)
        : change_time_(change_time), tail_(std::move(tail)) {
        if (!tail_) throw std::invalid_argument("Lg1tRlAgent: missing tail learner");
        if (change_time_ >= 0) head_.emplace(num_states, num_actions, horizon, std::move(head_config), std::move(rng));
    }

    Action select_action(State s, std::size_t t) override {
        if (head_ && static_cast<std::int64_t>(t) > change_time_) {
            head_steps_ = head_->steps_consumed();
            head_.reset();
        }
        return head_ ? head_->select_action(s, t) : tail_->select_action(s, t);
    }

    void observe(State s, Action a, double r, State next, std::size_t t) override {
        if (head_) {
            head_->observe(s, a, r, next, t);
            tail_->ingest(s, a, r, next, t);
        } else {
            tail_->observe(s, a, r, next, t);
            ++tail_steps_;
        }
    }

    std::uint64_t steps_consumed() const override {
        return (head_ ? head_->steps_consumed() : head_steps_) + tail_steps_;
    }
    Phase phase() const override { return head_ ? head_->phase() : tail_->phase(); }
    std::string name() const override { return "lg1t_rl"; }

    bool switched() const noexcept { return !head_.has_value(); }
    const Agent& tail() const noexcept { return *tail_; }

private:
    std::int64_t change_time_;
    std::optional<Lg1tAgent> head_;
    std::unique_ptr<Agent> tail_;
    std::uint64_t head_steps_ = 0;
    std::uint64_t tail_steps_ = 0;
};

}  // namespace lookahead
