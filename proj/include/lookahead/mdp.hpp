#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lookahead/rng.hpp"

namespace lookahead {

using State = std::size_t;
using Action = std::size_t;

enum class NoiseKind { deterministic, gaussian };

struct RewardNoiseSpec {
    NoiseKind kind = NoiseKind::deterministic;
    double variance = 0.0;

    static RewardNoiseSpec none() { return {}; }
    static RewardNoiseSpec gaussian(double variance) { return {NoiseKind::gaussian, variance}; }

    friend bool operator==(const RewardNoiseSpec&, const RewardNoiseSpec&) = default;
};

/**
 * Finite MDP with stationary transitions and mean rewards.
 *
 * Transitions are stored flat in [action][state][next_state] order and mean
 * rewards in [state][action] order. The constructor only checks shapes;
 * stochasticity of the rows is reported by validate_mdp.
 */
class TabularMdp {
public:
    TabularMdp() = default;

    TabularMdp(std::size_t num_states, std::size_t num_actions, std::vector<double> transitions,
               std::vector<double> mean_rewards, RewardNoiseSpec noise = {})
        : num_states_(num_states),
          num_actions_(num_actions),
          transitions_(std::move(transitions)),
          mean_rewards_(std::move(mean_rewards)),
          noise_(noise) {
        if (num_states_ == 0 || num_actions_ == 0)
            throw std::invalid_argument("TabularMdp: need at least one state and one action");
        if (transitions_.size() != num_actions_ * num_states_ * num_states_)
            throw std::invalid_argument("TabularMdp: transition tensor must have A*S*S entries");
        if (mean_rewards_.size() != num_states_ * num_actions_)
            throw std::invalid_argument("TabularMdp: reward matrix must have S*A entries");
        if (noise_.variance < 0.0) throw std::invalid_argument("TabularMdp: negative noise variance");
    }

    /// All-zero MDP of the given shape, to be filled through the mutators.
    static TabularMdp zeros(std::size_t num_states, std::size_t num_actions, RewardNoiseSpec noise = {}) {
        return TabularMdp(num_states, num_actions,
                          std::vector<double>(num_actions * num_states * num_states, 0.0),
                          std::vector<double>(num_states * num_actions, 0.0), noise);
    }

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_actions() const noexcept { return num_actions_; }
    const RewardNoiseSpec& noise() const noexcept { return noise_; }
    void set_noise(RewardNoiseSpec noise) { noise_ = noise; }

    std::span<const double> row(Action a, State s) const {
        return {transitions_.data() + (a * num_states_ + s) * num_states_, num_states_};
    }
    std::span<double> row(Action a, State s) {
        return {transitions_.data() + (a * num_states_ + s) * num_states_, num_states_};
    }
    double transition(Action a, State s, State next) const { return row(a, s)[next]; }
    double& transition(Action a, State s, State next) { return row(a, s)[next]; }

    double reward(State s, Action a) const { return mean_rewards_[s * num_actions_ + a]; }
    double& reward(State s, Action a) { return mean_rewards_[s * num_actions_ + a]; }

    const std::vector<double>& transitions() const noexcept { return transitions_; }
    const std::vector<double>& mean_rewards() const noexcept { return mean_rewards_; }

    void check_indices(State s, Action a) const {
        if (s >= num_states_) throw std::out_of_range("state index out of range");
        if (a >= num_actions_) throw std::out_of_range("action index out of range");
    }

    friend bool operator==(const TabularMdp&, const TabularMdp&) = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<double> transitions_;
    std::vector<double> mean_rewards_;
    RewardNoiseSpec noise_;
};

inline constexpr double kRowSumTolerance = 1e-9;

struct Violation {
    enum class Kind { row_sum, negative_entry, non_finite_transition, non_finite_reward };
    Kind kind;
    Action action;
    State state;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool mentions(Action a, State s) const {
        for (const auto& v : violations)
            if (v.action == a && v.state == s) return true;
        return false;
    }
};

/// Lists every malformed transition row and every non-finite reward. Never throws.
inline ValidationReport validate_mdp(const TabularMdp& mdp, double tolerance = kRowSumTolerance) {
    ValidationReport report;
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    for (Action a = 0; a < A; ++a) {
        for (State s = 0; s < S; ++s) {
            double sum = 0.0;
            bool negative = false;
            bool finite = true;
            for (double p : mdp.row(a, s)) {
                if (!std::isfinite(p)) finite = false;
                if (p < 0.0) negative = true;
                sum += p;
            }
            if (!finite) {
                report.violations.push_back({Violation::Kind::non_finite_transition, a, s, "non-finite entry"});
                continue;
            }
            if (negative)
                report.violations.push_back({Violation::Kind::negative_entry, a, s, "negative entry"});
            if (std::abs(sum - 1.0) > tolerance)
                report.violations.push_back(
                    {Violation::Kind::row_sum, a, s, "row sums to " + std::to_string(sum)});
        }
    }
    for (State s = 0; s < S; ++s)
        for (Action a = 0; a < A; ++a)
            if (!std::isfinite(mdp.reward(s, a)))
                report.violations.push_back({Violation::Kind::non_finite_reward, a, s, "non-finite reward"});
    return report;
}

/// Inverse CDF over `row` in ascending index order: the first index with
/// positive mass whose cumulative mass reaches u. A draw exactly on a
/// boundary goes to the lower index. Round-off leftovers go to the last index
/// with positive mass.
inline State sample_from_row(std::span<const double> row, double u) {
    double cumulative = 0.0;
    State last_positive = 0;
    for (State i = 0; i < row.size(); ++i) {
        if (row[i] <= 0.0) continue;
        last_positive = i;
        cumulative += row[i];
        if (u <= cumulative) return i;
    }
    return last_positive;
}

/// One uniform draw per call.
inline State sample_transition(const TabularMdp& mdp, State s, Action a, RngStream& rng) {
    mdp.check_indices(s, a);
    return sample_from_row(mdp.row(a, s), rng.uniform());
}

/// Deterministic noise consumes no draws; gaussian consumes exactly two.
inline double sample_reward(const TabularMdp& mdp, State s, Action a, RngStream& rng) {
    mdp.check_indices(s, a);
    const double mean = mdp.reward(s, a);
    if (mdp.noise().kind == NoiseKind::deterministic) return mean;
    const double z = rng.normal();
    return mean + std::sqrt(mdp.noise().variance) * z;
}

}  // namespace lookahead
