#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>

#include "lookahead/mdp.hpp"
#include "lookahead/planning.hpp"

namespace lookahead {

struct DominanceCheck {
    bool holds = false;
    /// State 1 fails to carry the higher maximum reward.
    bool reward_order_violated = false;
    /// (s, a) with P_a(s, 1) > P_{a*_{s,1}}(s, 1), when one exists.
    std::optional<std::pair<State, Action>> witness;
};

/// Two-state stochastic dominance: max_a R(1, a) >= max_a R(0, a), and for both
/// states the 1-step greedy action maximizes the probability of moving to state 1.
inline DominanceCheck check_stochastic_dominance(const TabularMdp& mdp) {
    if (mdp.num_states() != 2)
        throw std::invalid_argument("check_stochastic_dominance: requires exactly two states");
    const auto A = mdp.num_actions();
    auto best_action = [&](State s) {
        Action best = 0;
        for (Action a = 1; a < A; ++a)
            if (mdp.reward(s, a) > mdp.reward(s, best)) best = a;
        return best;
    };
    DominanceCheck out;
    out.reward_order_violated = mdp.reward(1, best_action(1)) < mdp.reward(0, best_action(0));
    for (State s = 0; s < 2 && !out.witness; ++s) {
        const double p_star = mdp.transition(best_action(s), s, 1);
        for (Action a = 0; a < A; ++a) {
            if (mdp.transition(a, s, 1) > p_star) {
                out.witness = std::make_pair(s, a);
                break;
            }
        }
    }
    out.holds = !out.reward_order_violated && !out.witness;
    return out;
}

namespace linear_gap {
inline constexpr State kBad = 0;   // B
inline constexpr State kGood = 1;  // G; D_i follow at 2..S-1
inline constexpr Action kStay = 0;    // a_0
inline constexpr Action kEscape = 1;  // a_1; a_2.. duplicate it
}  // namespace linear_gap

/**
 * Instance on which every K-step lookahead greedy policy loses T - K against
 * the optimum from state B.
 *
 * States are [B, G, D_1..D_{S-2}] and actions [a_0, a_1, a_1 copies...]. At B,
 * a_0 stays at cost 1 while a_1 pays K + 1 once to reach the G-like states,
 * where a_0 is free.
 */
inline TabularMdp build_linear_gap_instance(std::size_t num_states, std::size_t num_actions, std::size_t k) {
    using namespace linear_gap;
    if (num_states < 2 || num_actions < 2)
        throw std::invalid_argument("build_linear_gap_instance: needs S >= 2 and A >= 2");
    auto mdp = TabularMdp::zeros(num_states, num_actions);
    const double spread = 1.0 / static_cast<double>(num_states - 1);
    for (Action a = 0; a < num_actions; ++a) {
        const bool stay = a == kStay;
        mdp.reward(kBad, a) = stay ? -1.0 : -static_cast<double>(k + 1);
        if (stay) {
            mdp.transition(a, kBad, kBad) = 1.0;
        } else {
            for (State n = kGood; n < num_states; ++n) mdp.transition(a, kBad, n) = spread;
        }
        for (State s = kGood; s < num_states; ++s) {
            mdp.reward(s, a) = stay ? 0.0 : -1.0;
            if (stay) {
                for (State n = kGood; n < num_states; ++n) mdp.transition(a, s, n) = spread;
            } else {
                mdp.transition(a, s, kBad) = 1.0;
            }
        }
    }
    return mdp;
}

/// V^{K,greedy}_0(s0) / V*_0(s0). Throws when V*_0(s0) <= 0.
inline double competitive_ratio(const TabularMdp& mdp, std::size_t k, std::size_t horizon, State s0) {
    if (s0 >= mdp.num_states()) throw std::out_of_range("competitive_ratio: initial state out of range");
    const double optimal = optimal_initial_values(mdp, horizon)[s0];
    if (!(optimal > 0.0)) throw std::domain_error("competitive_ratio: optimal value is not positive");
    return greedy_initial_values(mdp, k, horizon)[s0] / optimal;
}

}  // namespace lookahead
