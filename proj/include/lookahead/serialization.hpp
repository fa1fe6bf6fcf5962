#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lookahead/mdp.hpp"
#include "lookahead/planning.hpp"
#include "lookahead/threshold.hpp"

// JSON forms of the model and oracle types. Tensors are written as nested
// arrays in their natural index order.

namespace lookahead {

using Json = nlohmann::json;

inline Json to_json(const RewardNoiseSpec& n) {
    return {{"kind", n.kind == NoiseKind::gaussian ? "gaussian" : "deterministic"}, {"variance", n.variance}};
}

inline RewardNoiseSpec noise_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "deterministic") return RewardNoiseSpec::none();
    if (kind == "gaussian") return RewardNoiseSpec::gaussian(j.value("variance", 0.0));
    throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

inline Json to_json(const TabularMdp& mdp) {
    const auto S = mdp.num_states();
    const auto A = mdp.num_actions();
    Json transitions = Json::array();
    for (Action a = 0; a < A; ++a) {
        Json per_action = Json::array();
        for (State s = 0; s < S; ++s) {
            const auto row = mdp.row(a, s);
            per_action.push_back(std::vector<double>(row.begin(), row.end()));
        }
        transitions.push_back(std::move(per_action));
    }
    Json rewards = Json::array();
    for (State s = 0; s < S; ++s) {
        std::vector<double> row(A);
        for (Action a = 0; a < A; ++a) row[a] = mdp.reward(s, a);
        rewards.push_back(std::move(row));
    }
    return {{"num_states", S},
            {"num_actions", A},
            {"transitions", std::move(transitions)},
            {"mean_rewards", std::move(rewards)},
            {"noise", to_json(mdp.noise())}};
}

inline TabularMdp mdp_from_json(const Json& j) {
    const auto S = j.at("num_states").get<std::size_t>();
    const auto A = j.at("num_actions").get<std::size_t>();
    const auto& tr = j.at("transitions");
    const auto& rw = j.at("mean_rewards");
    if (tr.size() != A || rw.size() != S) throw std::invalid_argument("mdp: tensor shape does not match S, A");
    std::vector<double> transitions;
    transitions.reserve(A * S * S);
    for (const auto& per_action : tr) {
        if (per_action.size() != S) throw std::invalid_argument("mdp: transitions must be A x S x S");
        for (const auto& row : per_action) {
            if (row.size() != S) throw std::invalid_argument("mdp: transitions must be A x S x S");
            for (const auto& p : row) transitions.push_back(p.get<double>());
        }
    }
    std::vector<double> rewards;
    rewards.reserve(S * A);
    for (const auto& row : rw) {
        if (row.size() != A) throw std::invalid_argument("mdp: mean_rewards must be S x A");
        for (const auto& r : row) rewards.push_back(r.get<double>());
    }
    const auto noise = j.contains("noise") ? noise_from_json(j.at("noise")) : RewardNoiseSpec::none();
    return TabularMdp(S, A, std::move(transitions), std::move(rewards), noise);
}

inline Json to_json(const ThresholdSchedule& g) {
    if (g.is_constant()) return g.constant();
    return g.values();
}

inline ThresholdSchedule schedule_from_json(const Json& j) {
    if (j.is_number()) return ThresholdSchedule(j.get<double>());
    if (j.is_array()) return ThresholdSchedule(j.get<std::vector<double>>());
    throw std::invalid_argument("gamma must be a number or an array of numbers");
}

inline Json to_json(const StageValueTables& t) {
    return {{"horizon", t.horizon}, {"num_states", t.num_states}, {"num_actions", t.num_actions},
            {"q", t.q},             {"v", t.v}};
}

inline StageValueTables tables_from_json(const Json& j) {
    StageValueTables t;
    t.horizon = j.at("horizon").get<std::size_t>();
    t.num_states = j.at("num_states").get<std::size_t>();
    t.num_actions = j.at("num_actions").get<std::size_t>();
    t.q = j.at("q").get<std::vector<double>>();
    t.v = j.at("v").get<std::vector<double>>();
    const auto stages = t.horizon + 1;
    if (t.q.size() != stages * t.num_states * t.num_actions || t.v.size() != stages * t.num_states)
        throw std::invalid_argument("value tables: size does not match horizon and shape");
    return t;
}

inline Json to_json(const KStepRewardTable& t) {
    return {{"k", t.k}, {"num_states", t.num_states}, {"num_actions", t.num_actions}, {"r", t.r}};
}

inline KStepRewardTable k_table_from_json(const Json& j) {
    KStepRewardTable t;
    t.k = j.at("k").get<std::size_t>();
    t.num_states = j.at("num_states").get<std::size_t>();
    t.num_actions = j.at("num_actions").get<std::size_t>();
    t.r = j.at("r").get<std::vector<double>>();
    if (t.r.size() != t.k * t.num_states * t.num_actions)
        throw std::invalid_argument("k-step table: size does not match shape");
    return t;
}

inline Json to_json(const PolicySpec& p) {
    Json j = {{"kind", p.kind == PolicyKind::deterministic ? "deterministic" : "uniform_over_set"},
              {"horizon", p.horizon},
              {"num_states", p.num_states},
              {"num_actions", p.num_actions},
              {"actions", p.actions}};
    if (p.kind == PolicyKind::uniform_over_set) j["allowed"] = p.allowed;
    return j;
}

inline PolicySpec policy_from_json(const Json& j) {
    PolicySpec p;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "deterministic")
        p.kind = PolicyKind::deterministic;
    else if (kind == "uniform_over_set")
        p.kind = PolicyKind::uniform_over_set;
    else
        throw std::invalid_argument("unknown policy kind '" + kind + "'");
    p.horizon = j.at("horizon").get<std::size_t>();
    p.num_states = j.at("num_states").get<std::size_t>();
    p.num_actions = j.at("num_actions").get<std::size_t>();
    p.actions = j.at("actions").get<std::vector<Action>>();
    if (p.actions.size() != (p.horizon + 1) * p.num_states) throw std::invalid_argument("policy: wrong action count");
    for (const auto a : p.actions)
        if (a >= p.num_actions) throw std::invalid_argument("policy: action out of range");
    if (p.kind == PolicyKind::uniform_over_set) {
        p.allowed = j.at("allowed").get<std::vector<std::uint8_t>>();
        if (p.allowed.size() != (p.horizon + 1) * p.num_states * p.num_actions)
            throw std::invalid_argument("policy: wrong mask size");
    }
    return p;
}

}  // namespace lookahead
