#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lookahead/planning.hpp"
#include "lookahead/simulate.hpp"
#include "lookahead/threshold.hpp"

namespace lookahead {

/// max(0, gamma_t - r^{min(T - t + 1, K)}(s, a)).
inline double step_cost(const KStepRewardTable& table, double gamma_t, State s, Action a, std::size_t t,
                        std::size_t horizon, std::size_t k) {
    if (table.k < std::min(k, horizon + 1)) throw std::invalid_argument("step_cost: planner table too shallow");
    const double r = table.at(effective_depth(t, horizon, k), s, a);
    return std::max(0.0, gamma_t - r);
}

/// Cost target (K, gamma) in force up to and including `until`.
struct RegretSegment {
    std::size_t k = 1;
    ThresholdSchedule gamma{0.0};
    std::int64_t until = std::numeric_limits<std::int64_t>::max();
};

/// Per-step costs. Segments are consulted in order; the last one covers the
/// rest of the run.
inline std::vector<double> step_costs(const RunRecord& run, const KStepRewardTable& table,
                                      const std::vector<RegretSegment>& segments) {
    if (segments.empty()) throw std::invalid_argument("step_costs: no cost target");
    const auto T = run.meta.horizon;
    std::vector<double> out;
    out.reserve(run.steps.size());
    std::size_t seg = 0;
    for (const auto& step : run.steps) {
        while (seg + 1 < segments.size() && static_cast<std::int64_t>(step.t) > segments[seg].until) ++seg;
        const auto& target = segments[seg];
        out.push_back(step_cost(table, target.gamma.at(step.t), step.s, step.a, step.t, T, target.k));
    }
    return out;
}

/// Prefix sums of step_cost.
inline std::vector<double> regret_trace(const RunRecord& run, const KStepRewardTable& table,
                                        const std::vector<RegretSegment>& segments) {
    auto out = step_costs(run, table, segments);
    double total = 0.0;
    for (auto& c : out) c = total += c;
    return out;
}

inline std::vector<double> regret_trace(const RunRecord& run, const KStepRewardTable& table,
                                        const ThresholdSchedule& gamma, std::size_t k) {
    return regret_trace(run, table, std::vector<RegretSegment>{{k, gamma}});
}

/// (sum_{j <= t} r_j) / (t + 1).
inline std::vector<double> running_average(const RunRecord& run) {
    std::vector<double> out;
    out.reserve(run.steps.size());
    double total = 0.0;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        total += run.steps[i].r;
        out.push_back(total / static_cast<double>(i + 1));
    }
    return out;
}

inline double cumulative_reward(const RunRecord& run) {
    double total = 0.0;
    for (const auto& step : run.steps) total += step.r;
    return total;
}

struct GapStats {
    double delta_k = std::numeric_limits<double>::infinity();       // min |gamma_t - r^K| over all (s, a, t)
    double delta_k_plus = std::numeric_limits<double>::infinity();  // same, over pairs with r^K >= gamma_t
    bool degenerate = false;                                        // some r^K equals its threshold
    bool per_step = false;                                          // gaps carry a t dimension
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> gaps;  // gamma_t - r^K(s, a) in [t][s][a], or [s][a] when constant

    double gap(std::size_t t, State s, Action a) const {
        const std::size_t base = per_step ? t * num_states * num_actions : 0;
        return gaps[base + s * num_actions + a];
    }
};

inline GapStats gap_stats(const KStepRewardTable& table, const ThresholdSchedule& gamma, std::size_t k,
                          std::size_t horizon) {
    if (table.k < k) throw std::invalid_argument("gap_stats: planner table too shallow");
    if (!gamma.covers(horizon)) throw std::invalid_argument("gap_stats: schedule shorter than T + 1");
    GapStats g;
    g.num_states = table.num_states;
    g.num_actions = table.num_actions;
    g.per_step = !gamma.is_constant();
    const std::size_t stages = g.per_step ? horizon + 1 : 1;
    const auto layer = table.layer(k);
    g.gaps.reserve(stages * layer.size());
    for (std::size_t t = 0; t < stages; ++t) {
        const double gt = gamma.at(t);
        for (const double r : layer) {
            const double d = gt - r;
            g.gaps.push_back(d);
            g.delta_k = std::min(g.delta_k, std::abs(d));
            if (d <= 0.0) g.delta_k_plus = std::min(g.delta_k_plus, -d);
        }
    }
    g.degenerate = g.delta_k == 0.0;
    return g;
}

/// Outcome of checking that every (s, t) has an action meeting its threshold.
struct GoodActionCheck {
    bool holds = true;
    std::uint64_t violations = 0;  // (t, s) pairs with no good action
    std::optional<std::pair<std::size_t, State>> witness;
};

inline GoodActionCheck check_good_action(const KStepRewardTable& table, const ThresholdSchedule& gamma,
                                         std::size_t k, std::size_t horizon, std::int64_t from = 0,
                                         std::int64_t until = std::numeric_limits<std::int64_t>::max()) {
    GoodActionCheck out;
    const auto depth_cap = std::min(k, horizon + 1);
    if (table.k < depth_cap) throw std::invalid_argument("check_good_action: planner table too shallow");
    const auto first = static_cast<std::size_t>(std::max<std::int64_t>(from, 0));
    const auto last = until < 0 ? 0 : std::min<std::size_t>(horizon, static_cast<std::size_t>(until));
    if (until < 0 || first > last) return out;
    for (std::size_t t = first; t <= last; ++t) {
        const auto d = effective_depth(t, horizon, depth_cap);
        const double g = gamma.at(t);
        for (State s = 0; s < table.num_states; ++s) {
            const auto row = table.row(d, s);
            if (*std::max_element(row.begin(), row.end()) < g) {
                ++out.violations;
                if (!out.witness) out.witness = std::pair{t, s};
            }
        }
    }
    out.holds = out.violations == 0;
    return out;
}

}  // namespace lookahead
