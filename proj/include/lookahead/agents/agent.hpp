#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lookahead/mdp.hpp"
#include "lookahead/rng.hpp"

namespace lookahead {

/// How the step was chosen: a certified good action (exploit), a fallback
/// because no action was certified (explore), or a lookahead-estimation
/// rollout (subroutine).
enum class Phase : std::uint8_t { exploit, explore, subroutine };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::exploit: return "exploit";
        case Phase::explore: return "explore";
        default: return "subroutine";
    }
}

/**
 * Online learner interface.
 *
 * The driver calls select_action(s, t) then observe(s, a, r, s', t) once per
 * environment step, for t = 0..T. Agents only ever see these tuples, never
 * the environment's model. Multi-step subroutines are expressed by the agent
 * answering several consecutive select_action calls itself.
 */
class Agent {
public:
    virtual ~Agent() = default;

    virtual Action select_action(State s, std::size_t t) = 0;
    virtual void observe(State s, Action a, double r, State next, std::size_t t) = 0;

    /// Learn from a transition the agent did not choose (warm starts).
    virtual void ingest(State s, Action a, double r, State next, std::size_t t) { observe(s, a, r, next, t); }

    /// Environment steps consumed so far.
    virtual std::uint64_t steps_consumed() const = 0;

    /// Phase of the most recent select_action.
    virtual Phase phase() const { return Phase::exploit; }

    virtual std::string name() const = 0;
};

enum class ExplorationMode { uniform, ucb_index };

/// r_hat + (3.4 / n) * sqrt((ln ln max(n, 3) + ln(10 T)) / n); +inf when n = 0.
inline double ucb_index(double r_hat, std::uint64_t n, std::size_t horizon) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    const double nd = static_cast<double>(n);
    const double clamped = std::max(nd, 3.0);
    const double width = std::log(std::log(clamped)) + std::log(10.0 * static_cast<double>(horizon));
    return r_hat + (3.4 / nd) * std::sqrt(width / nd);
}

struct ThresholdChoice {
    Action action = 0;
    bool certified = false;  // picked from the good set
};

/**
 * Thresholding action choice shared by the LCB-guided learners.
 *
 * Good set = {a : lcb[a] >= gamma}. A non-empty good set yields its highest-LCB
 * member. Otherwise uniform mode draws one action uniformly (one rng call) and
 * ucb_index mode takes the largest index. Ties go to the lowest index.
 */
inline ThresholdChoice threshold_select(std::span<const double> lcb, double gamma, RngStream& rng,
                                        ExplorationMode mode, std::span<const double> ucb_indices) {
    bool any = false;
    Action best = 0;
    for (Action a = 0; a < lcb.size(); ++a) {
        if (lcb[a] >= gamma && (!any || lcb[a] > lcb[best])) {
            best = a;
            any = true;
        }
    }
    if (any) return {best, true};
    if (mode == ExplorationMode::uniform) return {static_cast<Action>(rng.uniform_index(lcb.size())), false};
    Action pick = 0;
    for (Action a = 1; a < ucb_indices.size(); ++a)
        if (ucb_indices[a] > ucb_indices[pick]) pick = a;
    return {pick, false};
}

/// eps = min{1, 1 / ((N + 1)^p * min{eta, 1/2})}.
inline double exploration_probability(std::uint64_t previous_count, double p, double eta) {
    const double denom = std::pow(static_cast<double>(previous_count) + 1.0, p) * std::min(eta, 0.5);
    return std::min(1.0, 1.0 / denom);
}

}  // namespace lookahead
