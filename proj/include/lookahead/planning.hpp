#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "lookahead/mdp.hpp"
#include "lookahead/threshold.hpp"

namespace lookahead {

/// Index of the maximum; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

/// q(s, a) = R(s, a) + sum_s' P_a(s, s') * v_next(s'), written into `q` in
/// [state][action] layout. Every planner in this file goes through this one
/// routine, so tables built by different entry points agree bit-for-bit.
inline void bellman_backup(const TabularMdp& mdp, std::span<const double> v_next, std::span<double> q) {
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    for (State s = 0; s < S; ++s) {
        for (Action a = 0; a < A; ++a) {
            double cont = 0.0;
            const auto p = mdp.row(a, s);
            for (State n = 0; n < S; ++n) cont += p[n] * v_next[n];
            q[s * A + a] = mdp.reward(s, a) + cont;
        }
    }
}

/// Terminal stage: q(s, a) = R(s, a).
inline void terminal_stage(const TabularMdp& mdp, std::span<double> q) {
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    for (State s = 0; s < S; ++s)
        for (Action a = 0; a < A; ++a) q[s * A + a] = mdp.reward(s, a);
}

inline void max_over_actions(std::span<const double> q, std::size_t num_actions, std::span<double> v) {
    for (std::size_t s = 0; s < v.size(); ++s) {
        const auto qs = q.subspan(s * num_actions, num_actions);
        v[s] = *std::max_element(qs.begin(), qs.end());
    }
}

/// Q*_h and V*_h for stages h = 0..T. A run makes T + 1 decisions.
struct StageValueTables {
    std::size_t horizon = 0;
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> q;  // [h][s][a]
    std::vector<double> v;  // [h][s]

    double q_at(std::size_t h, State s, Action a) const { return q[(h * num_states + s) * num_actions + a]; }
    double v_at(std::size_t h, State s) const { return v[h * num_states + s]; }
    std::span<const double> q_stage(std::size_t h) const {
        return {q.data() + h * num_states * num_actions, num_states * num_actions};
    }
    std::span<const double> q_row(std::size_t h, State s) const {
        return {q.data() + (h * num_states + s) * num_actions, num_actions};
    }
    std::span<const double> v_stage(std::size_t h) const { return {v.data() + h * num_states, num_states}; }
    Action best_action(std::size_t h, State s) const { return argmax(q_row(h, s)); }
};

inline StageValueTables backward_induction(const TabularMdp& mdp, std::size_t horizon) {
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    StageValueTables t{horizon, S, A, std::vector<double>((horizon + 1) * S * A), std::vector<double>((horizon + 1) * S)};
    auto q_of = [&](std::size_t h) { return std::span<double>(t.q.data() + h * S * A, S * A); };
    auto v_of = [&](std::size_t h) { return std::span<double>(t.v.data() + h * S, S); };
    terminal_stage(mdp, q_of(horizon));
    max_over_actions(q_of(horizon), A, v_of(horizon));
    for (std::size_t h = horizon; h-- > 0;) {
        bellman_backup(mdp, v_of(h + 1), q_of(h));
        max_over_actions(q_of(h), A, v_of(h));
    }
    return t;
}

/// V*_0 only, in O(S) memory. Same arithmetic as backward_induction.
inline std::vector<double> optimal_initial_values(const TabularMdp& mdp, std::size_t horizon) {
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    std::vector<double> q(S * A);
    std::vector<double> v(S);
    terminal_stage(mdp, q);
    max_over_actions(q, A, v);
    for (std::size_t h = horizon; h-- > 0;) {
        bellman_backup(mdp, v, q);
        max_over_actions(q, A, v);
    }
    return v;
}

/// d-step lookahead rewards r^d(s, a) for d = 1..K.
struct KStepRewardTable {
    std::size_t k = 0;
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> r;  // [d - 1][s][a]

    double at(std::size_t depth, State s, Action a) const {
        if (depth < 1 || depth > k) throw std::out_of_range("KStepRewardTable: depth out of range");
        return r[((depth - 1) * num_states + s) * num_actions + a];
    }
    std::span<const double> row(std::size_t depth, State s) const {
        if (depth < 1 || depth > k) throw std::out_of_range("KStepRewardTable: depth out of range");
        return {r.data() + ((depth - 1) * num_states + s) * num_actions, num_actions};
    }
    std::span<const double> layer(std::size_t depth) const {
        if (depth < 1 || depth > k) throw std::out_of_range("KStepRewardTable: depth out of range");
        return {r.data() + (depth - 1) * num_states * num_actions, num_states * num_actions};
    }
    /// a*_{s,d}
    Action best_action(std::size_t depth, State s) const { return argmax(row(depth, s)); }
};

inline KStepRewardTable k_step_rewards(const TabularMdp& mdp, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k_step_rewards: K must be at least 1");
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    KStepRewardTable t{k, S, A, std::vector<double>(k * S * A)};
    std::vector<double> v(S);
    terminal_stage(mdp, std::span<double>(t.r.data(), S * A));
    for (std::size_t d = 2; d <= k; ++d) {
        max_over_actions(std::span<const double>(t.r.data() + (d - 2) * S * A, S * A), A, v);
        bellman_backup(mdp, v, std::span<double>(t.r.data() + (d - 1) * S * A, S * A));
    }
    return t;
}

/// Remaining horizon at decision t of a run with decisions 0..T.
constexpr std::size_t remaining_horizon(std::size_t t, std::size_t horizon) noexcept { return horizon - t + 1; }

/// Lookahead depth used at decision t: min(T - t + 1, K).
constexpr std::size_t effective_depth(std::size_t t, std::size_t horizon, std::size_t k) noexcept {
    return std::min(remaining_horizon(t, horizon), k);
}

enum class PolicyKind { deterministic, uniform_over_set };

/**
 * Oracle policy over stages 0..T.
 *
 * `actions` holds the played action (deterministic) or the fallback used when
 * the stage's set is empty (uniform_over_set). `allowed` is a membership mask
 * in [t][s][a] layout and is empty for deterministic policies.
 */
struct PolicySpec {
    PolicyKind kind = PolicyKind::deterministic;
    std::size_t horizon = 0;
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<Action> actions;        // [t][s]
    std::vector<std::uint8_t> allowed;  // [t][s][a]

    Action action(std::size_t t, State s) const { return actions[t * num_states + s]; }
    bool in_set(std::size_t t, State s, Action a) const {
        return kind == PolicyKind::uniform_over_set && allowed[(t * num_states + s) * num_actions + a] != 0;
    }
    std::size_t set_size(std::size_t t, State s) const {
        if (kind == PolicyKind::deterministic) return 0;
        std::size_t n = 0;
        for (Action a = 0; a < num_actions; ++a) n += in_set(t, s, a) ? 1 : 0;
        return n;
    }

    /// Probability of playing a at (t, s).
    double probability(std::size_t t, State s, Action a) const {
        if (kind == PolicyKind::uniform_over_set) {
            const auto n = set_size(t, s);
            if (n > 0) return in_set(t, s, a) ? 1.0 / static_cast<double>(n) : 0.0;
        }
        return action(t, s) == a ? 1.0 : 0.0;
    }

    bool same_actions_as(const PolicySpec& other) const {
        if (horizon != other.horizon || num_states != other.num_states) return false;
        for (std::size_t t = 0; t <= horizon; ++t)
            for (State s = 0; s < num_states; ++s)
                for (Action a = 0; a < num_actions; ++a)
                    if (probability(t, s, a) != other.probability(t, s, a)) return false;
        return true;
    }
};

/// Deterministic policy playing argmax_a Q*_t(s, a).
inline PolicySpec optimal_policy(const StageValueTables& tables) {
    PolicySpec p{PolicyKind::deterministic, tables.horizon, tables.num_states, tables.num_actions, {}, {}};
    p.actions.resize((tables.horizon + 1) * tables.num_states);
    for (std::size_t t = 0; t <= tables.horizon; ++t)
        for (State s = 0; s < tables.num_states; ++s) p.actions[t * tables.num_states + s] = tables.best_action(t, s);
    return p;
}

/// K-step lookahead greedy policy: argmax_a r^{min(h, K)}(s, a) with h = T - t + 1.
inline PolicySpec greedy_policy(const TabularMdp& mdp, std::size_t k, std::size_t horizon) {
    if (k < 1) throw std::invalid_argument("greedy_policy: K must be at least 1");
    const auto depth = std::min(k, horizon + 1);
    const auto table = k_step_rewards(mdp, depth);
    const auto S = mdp.num_states();
    PolicySpec p{PolicyKind::deterministic, horizon, S, mdp.num_actions(), {}, {}};
    p.actions.resize((horizon + 1) * S);
    for (std::size_t t = 0; t <= horizon; ++t) {
        const auto d = effective_depth(t, horizon, depth);
        for (State s = 0; s < S; ++s) p.actions[t * S + s] = table.best_action(d, s);
    }
    return p;
}

/// K-step lookahead thresholding policy: uniform over {a : r^{min(h,K)}(s,a) >= gamma_t},
/// falling back to the greedy action when that set is empty.
inline PolicySpec thresholding_policy(const TabularMdp& mdp, std::size_t k, const ThresholdSchedule& gamma,
                                      std::size_t horizon) {
    if (k < 1) throw std::invalid_argument("thresholding_policy: K must be at least 1");
    if (!gamma.covers(horizon)) throw std::invalid_argument("thresholding_policy: schedule shorter than T + 1");
    const auto depth = std::min(k, horizon + 1);
    const auto table = k_step_rewards(mdp, depth);
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    PolicySpec p{PolicyKind::uniform_over_set, horizon, S, A, {}, {}};
    p.actions.resize((horizon + 1) * S);
    p.allowed.assign((horizon + 1) * S * A, 0);
    for (std::size_t t = 0; t <= horizon; ++t) {
        const auto d = effective_depth(t, horizon, depth);
        const double g = gamma.at(t);
        for (State s = 0; s < S; ++s) {
            const auto r = table.row(d, s);
            p.actions[t * S + s] = argmax(r);
            for (Action a = 0; a < A; ++a) p.allowed[(t * S + s) * A + a] = r[a] >= g ? 1 : 0;
        }
    }
    return p;
}

struct PolicyEvaluation {
    double initial_value = 0.0;  // V^pi_0(s0)
    std::size_t horizon = 0;
    std::size_t num_states = 0;
    std::vector<double> v;  // [h][s]

    double v_at(std::size_t h, State s) const { return v[h * num_states + s]; }
};

/// Exact V^pi_h(s) by backward recursion over the policy's action distribution.
inline PolicyEvaluation evaluate_policy(const TabularMdp& mdp, const PolicySpec& policy, std::size_t horizon,
                                        State s0) {
    if (policy.horizon < horizon || policy.num_states != mdp.num_states() ||
        policy.num_actions != mdp.num_actions())
        throw std::invalid_argument("evaluate_policy: policy does not cover this MDP/horizon");
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    if (s0 >= S) throw std::out_of_range("evaluate_policy: initial state out of range");
    PolicyEvaluation out{0.0, horizon, S, std::vector<double>((horizon + 1) * S)};
    std::vector<double> q(S * A);
    for (std::size_t h = horizon + 1; h-- > 0;) {
        if (h == horizon)
            terminal_stage(mdp, q);
        else
            bellman_backup(mdp, std::span<const double>(out.v.data() + (h + 1) * S, S), q);
        for (State s = 0; s < S; ++s) {
            double value = 0.0;
            if (policy.kind == PolicyKind::deterministic || policy.set_size(h, s) == 0) {
                value = q[s * A + policy.action(h, s)];
            } else {
                const auto n = static_cast<double>(policy.set_size(h, s));
                for (Action a = 0; a < A; ++a)
                    if (policy.in_set(h, s, a)) value += q[s * A + a] / n;
            }
            out.v[h * S + s] = value;
        }
    }
    out.initial_value = out.v[s0];
    return out;
}

/// V^{K,greedy}_0 for every initial state in O(S * A * K) memory. Agrees with
/// evaluate_policy(greedy_policy(...)).
inline std::vector<double> greedy_initial_values(const TabularMdp& mdp, std::size_t k, std::size_t horizon) {
    if (k < 1) throw std::invalid_argument("greedy_initial_values: K must be at least 1");
    const auto depth = std::min(k, horizon + 1);
    const auto table = k_step_rewards(mdp, depth);
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    std::vector<double> q(S * A);
    std::vector<double> v(S);
    for (std::size_t h = horizon + 1; h-- > 0;) {
        if (h == horizon)
            terminal_stage(mdp, q);
        else
            bellman_backup(mdp, v, q);
        const auto d = effective_depth(h, horizon, depth);
        for (State s = 0; s < S; ++s) v[s] = q[s * A + table.best_action(d, s)];
    }
    return v;
}

/// V^{K,gamma}_0 of the thresholding policy for every initial state, in the
/// same lean form as greedy_initial_values.
inline std::vector<double> thresholding_initial_values(const TabularMdp& mdp, std::size_t k,
                                                       const ThresholdSchedule& gamma, std::size_t horizon) {
    if (k < 1) throw std::invalid_argument("thresholding_initial_values: K must be at least 1");
    if (!gamma.covers(horizon)) throw std::invalid_argument("thresholding_initial_values: schedule shorter than T + 1");
    const auto depth = std::min(k, horizon + 1);
    const auto table = k_step_rewards(mdp, depth);
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    std::vector<double> q(S * A);
    std::vector<double> v(S);
    for (std::size_t h = horizon + 1; h-- > 0;) {
        if (h == horizon)
            terminal_stage(mdp, q);
        else
            bellman_backup(mdp, v, q);
        const auto d = effective_depth(h, horizon, depth);
        const double g = gamma.at(h);
        for (State s = 0; s < S; ++s) {
            const auto r = table.row(d, s);
            double sum = 0.0;
            std::size_t n = 0;
            for (Action a = 0; a < A; ++a)
                if (r[a] >= g) {
                    sum += q[s * A + a];
                    ++n;
                }
            v[s] = n > 0 ? sum / static_cast<double>(n) : q[s * A + argmax(r)];
        }
    }
    return v;
}

}  // namespace lookahead
