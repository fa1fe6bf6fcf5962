#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "lookahead/agents/agent.hpp"
#include "lookahead/agents/baselines.hpp"
#include "lookahead/agents/hybrids.hpp"
#include "lookahead/agents/lg1t.hpp"
#include "lookahead/agents/lgkt.hpp"

namespace lookahead {

/// Declarative agent description, as read from an experiment config.
struct AgentConfig {
    std::string algorithm = "lg1t";  // lg1t, lgkt, lg1_2t, lg1t_rl, ucrl2, q_episodic, q_optimistic
    std::string label;               // display name; defaults to the algorithm
    std::size_t k = 1;
    ThresholdSchedule gamma{0.3};
    ThresholdSchedule tail_gamma{0.9};  // second-phase threshold of lg1_2t
    double eta = 0.5;
    double p = 0.5;
    ExplorationMode mode = ExplorationMode::ucb_index;
    std::int64_t change_time = 100;
    std::string sub_alg = "ucb";
    std::size_t episode_length = 10;
    double discount = 0.99;
    double delta = 0.05;
    double span = 1.0;

    std::string display_name() const { return label.empty() ? algorithm : label; }

    bool is_thresholding() const {
        return algorithm == "lg1t" || algorithm == "lgkt" || algorithm == "lg1_2t" || algorithm == "lg1t_rl";
    }
};

inline void validate(const AgentConfig& c) {
    if (c.sub_alg != "ucb") throw std::invalid_argument("agent '" + c.display_name() + "': sub_alg must be 'ucb'");
    if (c.algorithm == "lgkt" && c.k < 2) throw std::invalid_argument("agent '" + c.display_name() + "': lgkt needs k >= 2");
    if (c.algorithm == "lg1t" && c.k != 1) throw std::invalid_argument("agent '" + c.display_name() + "': lg1t has k = 1");
    if (c.algorithm == "q_episodic" && c.episode_length == 0)
        throw std::invalid_argument("agent '" + c.display_name() + "': episode_length must be positive");
    if (c.algorithm == "q_optimistic" && !(c.discount >= 0.0 && c.discount < 1.0))
        throw std::invalid_argument("agent '" + c.display_name() + "': discount must be in [0, 1)");
    static const char* known[] = {"lg1t", "lgkt", "lg1_2t", "lg1t_rl", "ucrl2", "q_episodic", "q_optimistic"};
    for (const char* name : known)
        if (c.algorithm == name) return;
    throw std::invalid_argument("unknown algorithm '" + c.algorithm + "'");
}

inline std::unique_ptr<Agent> make_agent(const AgentConfig& c, std::size_t num_states, std::size_t num_actions,
                                         std::size_t horizon, RngStream rng) {
    validate(c);
    const Lg1tConfig head{c.gamma, c.mode};
    if (c.algorithm == "lg1t") return std::make_unique<Lg1tAgent>(num_states, num_actions, horizon, head, std::move(rng));
    if (c.algorithm == "lgkt") {
        LgktConfig cfg{c.k, c.gamma, c.eta, c.p, c.mode};
        return std::make_unique<LgktAgent>(num_states, num_actions, horizon, std::move(cfg), std::move(rng));
    }
    if (c.algorithm == "lg1_2t") {
        LgktConfig tail{2, c.tail_gamma, c.eta, c.p, c.mode};
        return std::make_unique<Lg12tAgent>(num_states, num_actions, horizon, c.change_time, head, std::move(tail),
                                            std::move(rng));
    }
    if (c.algorithm == "lg1t_rl") {
        auto tail = std::make_unique<Ucrl2Agent>(num_states, num_actions, Ucrl2Config{c.delta});
        return std::make_unique<Lg1tRlAgent>(num_states, num_actions, horizon, c.change_time, head, std::move(tail),
                                             std::move(rng));
    }
    if (c.algorithm == "ucrl2") return std::make_unique<Ucrl2Agent>(num_states, num_actions, Ucrl2Config{c.delta});
    if (c.algorithm == "q_episodic") {
        EpisodicQConfig cfg;
        cfg.episode_length = c.episode_length;
        cfg.delta = c.delta;
        return std::make_unique<EpisodicQAgent>(num_states, num_actions, horizon, cfg);
    }
    OptimisticQConfig cfg;
    cfg.discount = c.discount;
    cfg.delta = c.delta;
    cfg.span = c.span;
    return std::make_unique<OptimisticQAgent>(num_states, num_actions, horizon, cfg);
}

}  // namespace lookahead
