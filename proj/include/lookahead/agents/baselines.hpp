#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lookahead/agents/agent.hpp"
#include "lookahead/planning.hpp"

namespace lookahead {

struct Ucrl2Config {
    double delta = 0.05;
    double tolerance = 1e-4;
    std::size_t max_iterations = 10000;
};

/**
 * UCRL2 for the average-reward criterion.
 *
 * Episodes end when some pair's in-episode count reaches its count at the
 * start of the episode. Each episode solves the optimistic model with
 * extended value iteration. No randomness is involved.
 */
class Ucrl2Agent : public Agent {
public:
    Ucrl2Agent(std::size_t num_states, std::size_t num_actions, Ucrl2Config config = {})
        : S_(num_states),
          A_(num_actions),
          config_(config),
          n_(S_ * A_, 0),
          nu_(S_ * A_, 0),
          reward_sum_(S_ * A_, 0.0),
          counts_(S_ * A_ * S_, 0),
          policy_(S_, 0),
          u_(S_, 0.0) {
        if (!(config_.delta > 0.0 && config_.delta < 1.0)) throw std::invalid_argument("Ucrl2Agent: delta must be in (0, 1)");
    }

    Action select_action(State s, std::size_t t) override {
        if (replan_) start_episode(t);
        return policy_[s];
    }

    void observe(State s, Action a, double r, State next, std::size_t t) override {
        add(s, a, r, next);
        const auto i = s * A_ + a;
        ++nu_[i];
        ++steps_;
        if (nu_[i] >= std::max<std::uint64_t>(1, n_[i] - nu_[i])) replan_ = true;
        (void)t;
    }

    /// Counts only: the policy is recomputed at the next decision.
    void ingest(State s, Action a, double r, State next, std::size_t /*t*/) override {
        add(s, a, r, next);
        replan_ = true;
    }

    std::uint64_t steps_consumed() const override { return steps_; }
    std::string name() const override { return "ucrl2"; }

    std::uint64_t episodes() const noexcept { return episodes_; }
    std::uint64_t iteration_cap_hits() const noexcept { return cap_hits_; }
    std::size_t last_iterations() const noexcept { return last_iterations_; }
    const std::vector<Action>& policy() const noexcept { return policy_; }
    std::uint64_t visits(State s, Action a) const { return n_[s * A_ + a]; }

private:
    void add(State s, Action a, double r, State next) {
        const auto i = s * A_ + a;
        ++n_[i];
        reward_sum_[i] += r;
        ++counts_[i * S_ + next];
    }

    void start_episode(std::size_t t) {
        replan_ = false;
        ++episodes_;
        std::fill(nu_.begin(), nu_.end(), 0);
        extended_value_iteration(static_cast<double>(t) + 1.0);
    }

    void optimistic_row(std::size_t i, double radius, const std::vector<std::size_t>& order, std::vector<double>& p) const {
        const auto visits = n_[i];
        const State best = order.back();
        if (visits == 0) {
            std::fill(p.begin(), p.end(), 0.0);
            p[best] = 1.0;
            return;
        }
        const double inv = 1.0 / static_cast<double>(visits);
        for (State s2 = 0; s2 < S_; ++s2) p[s2] = static_cast<double>(counts_[i * S_ + s2]) * inv;
        p[best] = std::min(1.0, p[best] + radius / 2.0);
        double total = std::accumulate(p.begin(), p.end(), 0.0);
        for (std::size_t j = 0; j + 1 < order.size() && total > 1.0; ++j) {
            const State low = order[j];
            const double cut = std::min(p[low], total - 1.0);
            p[low] -= cut;
            total -= cut;
        }
    }

    void extended_value_iteration(double tk) {
        const double SA = static_cast<double>(S_ * A_);
        const double log_r = std::log(2.0 * SA * tk / config_.delta);
        const double log_p = std::log(2.0 * static_cast<double>(A_) * tk / config_.delta);
        std::vector<double> reward_ub(S_ * A_), radius(S_ * A_);
        for (std::size_t i = 0; i < S_ * A_; ++i) {
            const double m = std::max<double>(1.0, static_cast<double>(n_[i]));
            const double mean = n_[i] == 0 ? 0.0 : reward_sum_[i] / static_cast<double>(n_[i]);
            reward_ub[i] = mean + std::sqrt(7.0 * log_r / (2.0 * m));
            radius[i] = std::sqrt(14.0 * static_cast<double>(S_) * log_p / m);
        }

        std::vector<double> u = u_, next(S_), p(S_);
        std::vector<std::size_t> order(S_);
        std::vector<Action> policy(S_, 0);
        bool converged = false;
        std::size_t it = 0;
        while (it < config_.max_iterations) {
            ++it;
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return u[x] < u[y]; });
            for (State s = 0; s < S_; ++s) {
                double best = -std::numeric_limits<double>::infinity();
                for (Action a = 0; a < A_; ++a) {
                    const auto i = s * A_ + a;
                    optimistic_row(i, radius[i], order, p);
                    double value = reward_ub[i];
                    for (State s2 = 0; s2 < S_; ++s2) value += p[s2] * u[s2];
                    if (value > best) {
                        best = value;
                        policy[s] = a;
                    }
                }
                next[s] = best;
            }
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (State s = 0; s < S_; ++s) {
                const double d = next[s] - u[s];
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            const double shift = *std::min_element(next.begin(), next.end());
            for (State s = 0; s < S_; ++s) u[s] = next[s] - shift;
            if (hi - lo < config_.tolerance) {
                converged = true;
                break;
            }
        }
        last_iterations_ = it;
        if (!converged) {
            ++cap_hits_;
            if (!warned_) {
                std::cerr << "warning: ucrl2 value iteration hit the iteration cap; keeping the previous policy\n";
                warned_ = true;
            }
            return;
        }
        policy_ = std::move(policy);
        u_ = std::move(u);
    }

    std::size_t S_;
    std::size_t A_;
    Ucrl2Config config_;
    std::vector<std::uint64_t> n_;
    std::vector<std::uint64_t> nu_;
    std::vector<double> reward_sum_;
    std::vector<std::uint64_t> counts_;
    std::vector<Action> policy_;
    std::vector<double> u_;
    bool replan_ = true;
    bool warned_ = false;
    std::uint64_t steps_ = 0;
    std::uint64_t episodes_ = 0;
    std::uint64_t cap_hits_ = 0;
    std::size_t last_iterations_ = 0;
};

struct EpisodicQConfig {
    std::size_t episode_length = 10;  // H
    double bonus_scale = 1.0;         // c
    double delta = 0.05;
    double reward_max = 1.0;
};

/**
 * Optimistic Q-learning with Hoeffding bonuses (Jin et al., 2018).
 *
 * The single trajectory is cut into consecutive length-H pseudo-episodes;
 * the stage of step t is t mod H.
 */
class EpisodicQAgent : public Agent {
public:
    EpisodicQAgent(std::size_t num_states, std::size_t num_actions, std::size_t horizon, EpisodicQConfig config = {})
        : S_(num_states), A_(num_actions), config_(config) {
        if (config_.episode_length == 0) throw std::invalid_argument("EpisodicQAgent: H must be positive");
        const double H = static_cast<double>(config_.episode_length);
        iota_ = std::log(static_cast<double>(S_ * A_) * static_cast<double>(horizon + 1) / config_.delta);
        cap_ = H * config_.reward_max;
        q_.assign(config_.episode_length * S_ * A_, cap_);
        n_.assign(config_.episode_length * S_ * A_, 0);
    }

    Action select_action(State s, std::size_t t) override {
        const auto h = t % config_.episode_length;
        const double* row = &q_[(h * S_ + s) * A_];
        Action best = 0;
        for (Action a = 1; a < A_; ++a)
            if (row[a] > row[best]) best = a;
        return best;
    }

    void observe(State s, Action a, double r, State next, std::size_t t) override {
        const auto H = config_.episode_length;
        const auto h = t % H;
        const auto i = (h * S_ + s) * A_ + a;
        const double k = static_cast<double>(++n_[i]);
        const double Hd = static_cast<double>(H);
        const double alpha = (Hd + 1.0) / (Hd + k);
        const double bonus = config_.bonus_scale * std::sqrt(Hd * Hd * Hd * iota_ / k);
        double v_next = 0.0;
        if (h + 1 < H) {
            const double* row = &q_[((h + 1) * S_ + next) * A_];
            v_next = std::min(cap_, *std::max_element(row, row + A_));
        }
        q_[i] = (1.0 - alpha) * q_[i] + alpha * (r + v_next + bonus);
        ++steps_;
    }

    std::uint64_t steps_consumed() const override { return steps_; }
    std::string name() const override { return "q_episodic"; }

    double q(std::size_t stage, State s, Action a) const { return q_[(stage * S_ + s) * A_ + a]; }
    /// Largest value any update can produce with rewards bounded by reward_max.
    double q_bound() const {
        const double H = static_cast<double>(config_.episode_length);
        return cap_ + config_.reward_max + config_.bonus_scale * std::sqrt(H * H * H * iota_);
    }
    std::size_t stages() const noexcept { return config_.episode_length; }

private:
    std::size_t S_;
    std::size_t A_;
    EpisodicQConfig config_;
    double iota_ = 0.0;
    double cap_ = 0.0;
    std::vector<double> q_;
    std::vector<std::uint64_t> n_;
    std::uint64_t steps_ = 0;
};

struct OptimisticQConfig {
    double discount = 0.99;
    double span = 1.0;  // assumed span of the optimal bias
    double delta = 0.05;
    double reward_max = 1.0;
};

/// Optimistic discounted Q-learning for average-reward MDPs (Wei et al., 2020).
class OptimisticQAgent : public Agent {
public:
    OptimisticQAgent(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
                     OptimisticQConfig config = {})
        : S_(num_states), A_(num_actions), config_(config) {
        if (!(config_.discount >= 0.0 && config_.discount < 1.0))
            throw std::invalid_argument("OptimisticQAgent: discount must be in [0, 1)");
        H_ = 1.0 / (1.0 - config_.discount);
        iota_ = std::log(static_cast<double>(S_ * A_) * static_cast<double>(horizon + 1) / config_.delta);
        const double init = H_ * config_.reward_max;
        q_.assign(S_ * A_, init);
        v_.assign(S_, init);
        n_.assign(S_ * A_, 0);
    }

    Action select_action(State s, std::size_t /*t*/) override {
        const double* row = &q_[s * A_];
        Action best = 0;
        for (Action a = 1; a < A_; ++a)
            if (row[a] > row[best]) best = a;
        return best;
    }

    void observe(State s, Action a, double r, State next, std::size_t /*t*/) override {
        const auto i = s * A_ + a;
        const double tau = static_cast<double>(++n_[i]);
        const double alpha = (H_ + 1.0) / (H_ + tau);
        const double bonus = 4.0 * config_.span * std::sqrt(H_ * iota_ / tau);
        q_[i] = (1.0 - alpha) * q_[i] + alpha * (r + config_.discount * v_[next] + bonus);
        const double* row = &q_[s * A_];
        v_[s] = std::min(v_[s], *std::max_element(row, row + A_));
        ++steps_;
    }

    std::uint64_t steps_consumed() const override { return steps_; }
    std::string name() const override { return "q_optimistic"; }

    double q(State s, Action a) const { return q_[s * A_ + a]; }
    double q_bound() const { return H_ * config_.reward_max + 4.0 * config_.span * std::sqrt(H_ * iota_); }

private:
    std::size_t S_;
    std::size_t A_;
    OptimisticQConfig config_;
    double H_ = 1.0;
    double iota_ = 0.0;
    std::vector<double> q_;
    std::vector<double> v_;
    std::vector<std::uint64_t> n_;
    std::uint64_t steps_ = 0;
};

}  // namespace lookahead
