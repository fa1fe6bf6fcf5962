#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lookahead/agents/factory.hpp"
#include "lookahead/environments.hpp"
#include "lookahead/serialization.hpp"

namespace lookahead::harness {

struct EnvironmentSpec {
    std::string name = "synthetic";  // synthetic, jumpriverswim, frozenlake4x4, linear_gap, instance_file
    std::size_t instances = 1;
    std::size_t num_states = 10;
    std::size_t num_actions = 5;
    SyntheticMdpParams synthetic = SyntheticMdpParams::small();
    std::size_t rightmost = 4;  // jumpriverswim: states 0..rightmost
    std::size_t k = 1;          // linear_gap
    std::string path;           // instance_file
};

struct ThresholdOracle {
    std::size_t k = 1;
    ThresholdSchedule gamma{0.3};
};

struct OracleSpec {
    bool optimal = true;
    std::vector<std::size_t> greedy{1, 2};
    std::vector<ThresholdOracle> thresholding;
};

struct SeedSpec {
    std::size_t count = 1;
    std::uint64_t master = 2025;
};

struct ExperimentConfig {
    EnvironmentSpec environment;
    std::vector<AgentConfig> agents;
    std::size_t horizon = 20000;
    SeedSpec seeds;
    OracleSpec oracles;
    std::string output_dir = "results";
    std::size_t jobs = 1;
    State initial_state = 0;
    bool write_records = true;
};

inline std::string to_string(ExplorationMode m) { return m == ExplorationMode::uniform ? "uniform" : "ucb_index"; }

inline ExplorationMode exploration_mode_from(const std::string& s) {
    if (s == "uniform") return ExplorationMode::uniform;
    if (s == "ucb_index") return ExplorationMode::ucb_index;
    throw std::invalid_argument("exploration_mode must be 'uniform' or 'ucb_index'");
}

inline Json to_json(const AgentConfig& c) {
    Json j = {{"algorithm", c.algorithm}, {"label", c.display_name()}};
    if (c.is_thresholding()) {
        j["gamma"] = to_json(c.gamma);
        j["exploration_mode"] = to_string(c.mode);
    }
    if (c.algorithm == "lgkt" || c.algorithm == "lg1_2t") {
        j["k"] = c.algorithm == "lgkt" ? c.k : 2;
        j["eta"] = c.eta;
        j["p"] = c.p;
        j["sub_alg"] = c.sub_alg;
    }
    if (c.algorithm == "lg1_2t") j["tail_gamma"] = to_json(c.tail_gamma);
    if (c.algorithm == "lg1_2t" || c.algorithm == "lg1t_rl") j["t_c"] = c.change_time;
    if (c.algorithm == "ucrl2" || c.algorithm == "lg1t_rl" || c.algorithm == "q_episodic" ||
        c.algorithm == "q_optimistic")
        j["delta"] = c.delta;
    if (c.algorithm == "q_episodic") j["H"] = c.episode_length;
    if (c.algorithm == "q_optimistic") {
        j["discount"] = c.discount;
        j["span"] = c.span;
    }
    return j;
}

inline AgentConfig agent_from_json(const Json& j) {
    static const std::vector<std::string> known = {"algorithm", "label", "k",  "gamma",    "tail_gamma",
                                                   "eta",       "p",     "t_c", "sub_alg", "exploration_mode",
                                                   "H",         "discount", "delta", "span"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("agent: unknown field '" + key + "'");
    AgentConfig c;
    c.algorithm = j.at("algorithm").get<std::string>();
    if (c.algorithm == "lg2t") {
        c.algorithm = "lgkt";
        c.k = 2;
        if (!j.contains("label")) c.label = "lg2t";
    }
    if (c.algorithm == "lgkt") {
        if (c.k < 2) c.k = 2;
        c.gamma = 0.9;
    }
    if (c.algorithm == "lg1t_rl") c.change_time = 10000;
    if (j.contains("label")) c.label = j["label"].get<std::string>();
    if (j.contains("k")) c.k = j["k"].get<std::size_t>();
    if (j.contains("gamma")) c.gamma = schedule_from_json(j["gamma"]);
    if (j.contains("tail_gamma")) c.tail_gamma = schedule_from_json(j["tail_gamma"]);
    c.eta = j.value("eta", c.eta);
    c.p = j.value("p", c.p);
    c.change_time = j.value("t_c", c.change_time);
    c.sub_alg = j.value("sub_alg", c.sub_alg);
    if (j.contains("exploration_mode")) c.mode = exploration_mode_from(j["exploration_mode"].get<std::string>());
    c.episode_length = j.value("H", c.episode_length);
    c.discount = j.value("discount", c.discount);
    c.delta = j.value("delta", c.delta);
    c.span = j.value("span", c.span);
    validate(c);
    return c;
}

inline Json to_json(const EnvironmentSpec& e) {
    Json j = {{"name", e.name}};
    if (e.name == "synthetic") {
        j["instances"] = e.instances;
        j["num_states"] = e.num_states;
        j["num_actions"] = e.num_actions;
        j["reward_shape"] = e.synthetic.reward_shape;
        j["reward_scale"] = e.synthetic.reward_scale;
        j["transition_shape"] = e.synthetic.transition_shape;
        j["transition_scale"] = e.synthetic.transition_scale;
        j["reward_variance"] = e.synthetic.reward_variance;
    } else if (e.name == "jumpriverswim") {
        j["rightmost"] = e.rightmost;
    } else if (e.name == "linear_gap") {
        j["num_states"] = e.num_states;
        j["num_actions"] = e.num_actions;
        j["k"] = e.k;
    } else if (e.name == "instance_file") {
        j["path"] = e.path;
    }
    return j;
}

inline EnvironmentSpec environment_from_json(const Json& j) {
    EnvironmentSpec e;
    e.name = j.at("name").get<std::string>();
    if (e.name == "synthetic") {
        e.num_states = j.value("num_states", e.num_states);
        e.num_actions = j.value("num_actions", e.num_actions);
        if (j.value("params", std::string("small")) == "large") e.synthetic = SyntheticMdpParams::large();
        e.synthetic.reward_shape = j.value("reward_shape", e.synthetic.reward_shape);
        e.synthetic.reward_scale = j.value("reward_scale", e.synthetic.reward_scale);
        e.synthetic.transition_shape = j.value("transition_shape", e.synthetic.transition_shape);
        e.synthetic.transition_scale = j.value("transition_scale", e.synthetic.transition_scale);
        e.synthetic.reward_variance = j.value("reward_variance", e.synthetic.reward_variance);
        e.synthetic.validate();
        e.instances = j.value("instances", e.instances);
    } else if (e.name == "jumpriverswim") {
        e.rightmost = j.value("rightmost", e.rightmost);
        if (e.rightmost < 2) throw std::invalid_argument("jumpriverswim: rightmost must be at least 2");
    } else if (e.name == "frozenlake4x4") {
    } else if (e.name == "linear_gap") {
        e.num_states = j.value("num_states", std::size_t{2});
        e.num_actions = j.value("num_actions", std::size_t{2});
        e.k = j.value("k", std::size_t{1});
    } else if (e.name == "instance_file") {
        e.path = j.at("path").get<std::string>();
    } else {
        throw std::invalid_argument("unknown environment '" + e.name + "'");
    }
    if (e.name != "synthetic") e.instances = 1;
    if (e.instances == 0) throw std::invalid_argument("environment: instances must be positive");
    return e;
}

inline Json to_json(const OracleSpec& o) {
    Json th = Json::array();
    for (const auto& t : o.thresholding) th.push_back({{"k", t.k}, {"gamma", to_json(t.gamma)}});
    return {{"optimal", o.optimal}, {"greedy", o.greedy}, {"thresholding", std::move(th)}};
}

inline OracleSpec oracles_from_json(const Json& j) {
    OracleSpec o;
    o.optimal = j.value("optimal", o.optimal);
    if (j.contains("greedy")) o.greedy = j["greedy"].get<std::vector<std::size_t>>();
    if (j.contains("thresholding"))
        for (const auto& t : j["thresholding"])
            o.thresholding.push_back({t.value("k", std::size_t{1}), schedule_from_json(t.at("gamma"))});
    for (const auto k : o.greedy)
        if (k == 0) throw std::invalid_argument("oracles: greedy K must be positive");
    return o;
}

inline Json to_json(const ExperimentConfig& c) {
    Json agents = Json::array();
    for (const auto& a : c.agents) agents.push_back(to_json(a));
    return {{"environment", to_json(c.environment)},
            {"agents", std::move(agents)},
            {"horizon", c.horizon},
            {"seeds", {{"count", c.seeds.count}, {"master", c.seeds.master}}},
            {"oracles", to_json(c.oracles)},
            {"output_dir", c.output_dir},
            {"jobs", c.jobs},
            {"initial_state", c.initial_state},
            {"write_records", c.write_records}};
}

/// Checks the invariants that do not depend on the environment's size.
inline void validate(const ExperimentConfig& c) {
    if (c.horizon < 1) throw std::invalid_argument("config: horizon must be at least 1");
    if (c.seeds.count < 1) throw std::invalid_argument("config: seeds.count must be at least 1");
    if (c.agents.empty()) throw std::invalid_argument("config: agent list is empty");
    if (c.jobs < 1) throw std::invalid_argument("config: jobs must be at least 1");
    std::vector<std::string> labels;
    for (const auto& a : c.agents) {
        validate(a);
        if (std::find(labels.begin(), labels.end(), a.display_name()) != labels.end())
            throw std::invalid_argument("config: duplicate agent label '" + a.display_name() + "'");
        labels.push_back(a.display_name());
        if (!a.gamma.covers(c.horizon) || !a.tail_gamma.covers(c.horizon))
            throw std::invalid_argument("config: gamma schedule of '" + a.display_name() + "' is shorter than T + 1");
    }
}

inline ExperimentConfig config_from_json(const Json& j) {
    static const std::vector<std::string> known = {"environment", "agents", "horizon",       "seeds",
                                                   "oracles",     "output_dir", "jobs", "initial_state",
                                                   "write_records"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown field '" + key + "'");
    ExperimentConfig c;
    c.environment = environment_from_json(j.at("environment"));
    for (const auto& a : j.at("agents")) c.agents.push_back(agent_from_json(a));
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("seeds")) {
        const auto& s = j["seeds"];
        if (s.contains("count") && s["count"].is_number_integer() && s["count"].get<std::int64_t>() < 1)
            throw std::invalid_argument("config: seeds.count must be at least 1");
        c.seeds.count = s.value("count", c.seeds.count);
        c.seeds.master = s.value("master", c.seeds.master);
    }
    if (j.contains("oracles")) c.oracles = oracles_from_json(j["oracles"]);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);
    c.initial_state = j.value("initial_state", c.initial_state);
    c.write_records = j.value("write_records", c.write_records);
    validate(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

inline constexpr const char* kSeedEnvVar = "LOOKAHEAD_RL_SEED";

/// Applies the LOOKAHEAD_RL_SEED override, if set.
inline void apply_environment_overrides(ExperimentConfig& c) {
    const char* v = std::getenv(kSeedEnvVar);
    if (v == nullptr || *v == '\0') return;
    char* end = nullptr;
    const auto seed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0') throw std::invalid_argument(std::string(kSeedEnvVar) + " must be an unsigned integer");
    c.seeds.master = seed;
}

}  // namespace lookahead::harness
