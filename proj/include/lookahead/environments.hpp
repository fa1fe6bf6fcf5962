#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string_view>

#include "lookahead/mdp.hpp"
#include "lookahead/rng.hpp"

namespace lookahead {

/// Gamma parameters use the (shape, scale) convention: mean = shape * scale.
struct SyntheticMdpParams {
    double reward_shape = 0.5;
    double reward_scale = 1.0;
    double transition_shape = 0.1;
    double transition_scale = 10.0;
    double reward_variance = 0.5;

    /// S = 10, A = 5 suite.
    static SyntheticMdpParams small() { return {}; }
    /// S = 100, A = 25 suite.
    static SyntheticMdpParams large() { return {0.5, 1.0, 0.01, 1000.0, 0.5}; }

    void validate() const {
        if (!(reward_shape > 0 && reward_scale > 0 && transition_shape > 0 && transition_scale > 0))
            throw std::invalid_argument("SyntheticMdpParams: Gamma shapes and scales must be positive");
        if (reward_variance < 0) throw std::invalid_argument("SyntheticMdpParams: negative reward variance");
    }
};

/// Draw order: all mean rewards in [s][a] order, then transition rows in
/// [a][s] order, each row entrywise then normalized.
inline TabularMdp gen_synthetic_mdp(std::size_t num_states, std::size_t num_actions,
                                    const SyntheticMdpParams& params, RngStream& rng) {
    params.validate();
    if (num_states == 0 || num_actions == 0) throw std::invalid_argument("gen_synthetic_mdp: empty MDP");
    auto mdp = TabularMdp::zeros(num_states, num_actions, RewardNoiseSpec::gaussian(params.reward_variance));
    for (State s = 0; s < num_states; ++s)
        for (Action a = 0; a < num_actions; ++a) mdp.reward(s, a) = rng.gamma(params.reward_shape, params.reward_scale);
    for (Action a = 0; a < num_actions; ++a) {
        for (State s = 0; s < num_states; ++s) {
            auto row = mdp.row(a, s);
            double sum = 0.0;
            while (!(sum >= 1e-300)) {  // all-underflow rows are redrawn
                sum = 0.0;
                for (auto& p : row) {
                    p = rng.gamma(params.transition_shape, params.transition_scale);
                    sum += p;
                }
            }
            for (auto& p : row) p /= sum;
        }
    }
    return mdp;
}

namespace riverswim {
inline constexpr Action kLeft = 0;
inline constexpr Action kRight = 1;
inline constexpr double kJumpMass = 0.01;
}  // namespace riverswim

/**
 * JumpRiverSwim chain with states 0..S (S = rightmost index).
 *
 * Every row first spreads 0.01 uniformly over all S + 1 states; the remaining
 * 0.99 follows the chain dynamics. Swimming right at the far end earns 1,
 * swimming left at state 0 earns 0.2.
 */
inline TabularMdp jump_riverswim(std::size_t rightmost) {
    using namespace riverswim;
    if (rightmost < 2) throw std::invalid_argument("jump_riverswim: rightmost state index must be >= 2");
    const std::size_t n = rightmost + 1;
    auto mdp = TabularMdp::zeros(n, 2);
    const double jump = kJumpMass / static_cast<double>(n);
    for (Action a = 0; a < 2; ++a)
        for (State s = 0; s < n; ++s)
            for (State t = 0; t < n; ++t) mdp.transition(a, s, t) = jump;

    const double rest = 1.0 - kJumpMass;
    for (State s = 0; s < n; ++s) {
        const State left = s == 0 ? 0 : s - 1;
        mdp.transition(kLeft, s, left) += rest;
        if (s == 0) {
            mdp.transition(kRight, s, s) += 0.7;
            mdp.transition(kRight, s, s + 1) += 0.3 - kJumpMass;
        } else if (s == rightmost) {
            mdp.transition(kRight, s, left) += 0.7;
            mdp.transition(kRight, s, s) += 0.3 - kJumpMass;
        } else {
            mdp.transition(kRight, s, left) += 0.6;
            mdp.transition(kRight, s, s + 1) += 0.3 - kJumpMass;
            mdp.transition(kRight, s, s) += 0.1;
        }
    }
    mdp.reward(0, kLeft) = 0.2;
    mdp.reward(rightmost, kRight) = 1.0;
    return mdp;
}

namespace frozenlake {
inline constexpr Action kLeft = 0;
inline constexpr Action kDown = 1;
inline constexpr Action kRight = 2;
inline constexpr Action kUp = 3;
inline constexpr std::size_t kSide = 4;
inline constexpr std::array<std::string_view, kSide> kMap = {"SFFF", "FHFH", "FFFH", "HFFG"};
inline constexpr State kStart = 0;
inline constexpr State kGoal = 15;
inline constexpr double kFrozenReward = 0.2;
inline constexpr double kGoalReward = 1.0;

constexpr char tile(State s) { return kMap[s / kSide][s % kSide]; }
}  // namespace frozenlake

/// 4x4 FrozenLake. On frozen tiles the move goes the intended way or to either
/// perpendicular side with probability 1/3 each; holes and the goal send the
/// player back to the start on the next step.
inline TabularMdp frozen_lake_4x4() {
    using namespace frozenlake;
    constexpr std::size_t n = kSide * kSide;
    auto mdp = TabularMdp::zeros(n, 4);
    auto move = [](State s, Action dir) -> State {
        const auto r = s / kSide;
        const auto c = s % kSide;
        switch (dir) {
            case kLeft: return c == 0 ? s : s - 1;
            case kDown: return r + 1 == kSide ? s : s + kSide;
            case kRight: return c + 1 == kSide ? s : s + 1;
            default: return r == 0 ? s : s - kSide;
        }
    };
    for (State s = 0; s < n; ++s) {
        const char kind = tile(s);
        for (Action a = 0; a < 4; ++a) {
            if (kind == 'H' || kind == 'G') {
                mdp.transition(a, s, kStart) = 1.0;
            } else {
                const Action sides[3] = {a, (a + 1) % 4, (a + 3) % 4};
                for (Action d : sides) mdp.transition(a, s, move(s, d)) += 1.0 / 3.0;
            }
            mdp.reward(s, a) = kind == 'H' ? 0.0 : kind == 'G' ? kGoalReward : kFrozenReward;
        }
    }
    return mdp;
}

}  // namespace lookahead
