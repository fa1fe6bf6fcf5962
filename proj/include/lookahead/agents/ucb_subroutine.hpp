#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "lookahead/mdp.hpp"

namespace lookahead {

/**
 * UCB1 sampler used inside lookahead-estimation rollouts.
 *
 * One independent bandit per (reference pair, rollout depth, current state),
 * allocated on first use. Statistics are private to this object; the main
 * learner only sees the rewards it collects.
 */
class UcbSubroutine {
public:
    UcbSubroutine() = default;
    UcbSubroutine(std::size_t num_states, std::size_t num_actions)
        : num_states_(num_states), num_actions_(num_actions) {}

    /// Reference key for a rollout with no preceding (state, action).
    std::uint64_t no_reference() const noexcept { return num_states_ * num_actions_; }
    std::uint64_t reference(State s, Action a) const noexcept { return s * num_actions_ + a; }

    Action select(std::uint64_t ref, std::size_t depth, State s) const {
        const auto it = arms_.find(key(ref, depth, s));
        if (it == arms_.end()) return 0;
        const Arms& arms = it->second;
        Action best = 0;
        double best_index = -std::numeric_limits<double>::infinity();
        const double log_total = std::log(static_cast<double>(std::max<std::uint64_t>(arms.total, 1)));
        for (Action a = 0; a < num_actions_; ++a) {
            const auto n = arms.count[a];
            if (n == 0) return a;
            const double nd = static_cast<double>(n);
            const double index = arms.sum[a] / nd + std::sqrt(2.0 * log_total / nd);
            if (index > best_index) {
                best_index = index;
                best = a;
            }
        }
        return best;
    }

    void update(std::uint64_t ref, std::size_t depth, State s, Action a, double r) {
        auto [it, inserted] = arms_.try_emplace(key(ref, depth, s));
        Arms& arms = it->second;
        if (inserted) {
            arms.count.assign(num_actions_, 0);
            arms.sum.assign(num_actions_, 0.0);
        }
        ++arms.count[a];
        arms.sum[a] += r;
        ++arms.total;
    }

    std::uint64_t plays(std::uint64_t ref, std::size_t depth, State s, Action a) const {
        const auto it = arms_.find(key(ref, depth, s));
        return it == arms_.end() ? 0 : it->second.count[a];
    }

    std::size_t tables() const noexcept { return arms_.size(); }

private:
    struct Arms {
        std::vector<std::uint64_t> count;
        std::vector<double> sum;
        std::uint64_t total = 0;
    };

    std::uint64_t key(std::uint64_t ref, std::size_t depth, State s) const {
        return (ref * 64 + depth) * num_states_ + s;
    }

    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::unordered_map<std::uint64_t, Arms> arms_;
};

}  // namespace lookahead
