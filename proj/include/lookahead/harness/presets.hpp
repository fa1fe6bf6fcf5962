#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lookahead/harness/config.hpp"

namespace lookahead::harness {

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig1-left",    "fig1-right", "riverswim-5", "riverswim-8",
                                                   "riverswim-15", "frozenlake", "ablation"};
    return names;
}

/// Thresholding learners plus the retained baselines.
inline std::vector<AgentConfig> standard_agents(std::int64_t lg12t_change) {
    std::vector<AgentConfig> out;
    AgentConfig lg1t;
    lg1t.label = "lg1t";
    out.push_back(lg1t);

    AgentConfig lg2t;
    lg2t.algorithm = "lgkt";
    lg2t.label = "lg2t";
    lg2t.k = 2;
    lg2t.gamma = 0.9;
    out.push_back(lg2t);

    AgentConfig hybrid;
    hybrid.algorithm = "lg1_2t";
    hybrid.change_time = lg12t_change;
    out.push_back(hybrid);

    AgentConfig rl;
    rl.algorithm = "lg1t_rl";
    rl.change_time = 10000;
    out.push_back(rl);

    AgentConfig ucrl2;
    ucrl2.algorithm = "ucrl2";
    out.push_back(ucrl2);

    for (const double d : {0.9, 0.99}) {
        AgentConfig q;
        q.algorithm = "q_optimistic";
        q.discount = d;
        q.label = d == 0.9 ? "q_optimistic_0.9" : "q_optimistic_0.99";
        out.push_back(q);
    }
    for (const std::size_t H : {1, 10}) {
        AgentConfig q;
        q.algorithm = "q_episodic";
        q.episode_length = H;
        q.label = "q_episodic_H" + std::to_string(H);
        out.push_back(q);
    }
    return out;
}

inline ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.horizon = 20000;
    if (name == "fig1-left" || name == "fig1-right" || name == "ablation") {
        c.environment.name = "synthetic";
        c.environment.instances = 200;
        c.seeds.count = 1;
        c.write_records = false;
        if (name == "fig1-right") {
            c.environment.num_states = 100;
            c.environment.num_actions = 25;
            c.environment.synthetic = SyntheticMdpParams::large();
        }
        c.agents = standard_agents(100);
        if (name == "ablation") c.agents.resize(2);
        c.oracles.greedy = {1, 2};
        c.output_dir = "results/" + name;
        return c;
    }
    if (name == "riverswim-5" || name == "riverswim-8" || name == "riverswim-15") {
        c.environment.name = "jumpriverswim";
        c.environment.rightmost = name == "riverswim-5" ? 4 : name == "riverswim-8" ? 7 : 14;
        c.seeds.count = 100;
        c.agents = standard_agents(30);
        c.output_dir = "results/" + name;
        return c;
    }
    if (name == "frozenlake") {
        c.environment.name = "frozenlake4x4";
        c.seeds.count = 100;
        c.agents = standard_agents(30);
        c.output_dir = "results/" + name;
        return c;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace lookahead::harness
