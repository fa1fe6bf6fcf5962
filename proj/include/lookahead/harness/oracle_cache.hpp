#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lookahead/harness/config.hpp"
#include "lookahead/harness/io.hpp"
#include "lookahead/planning.hpp"
#include "lookahead/serialization.hpp"

namespace lookahead::harness {

/// Content hash of an instance: FNV-1a over its canonical JSON form.
inline std::string instance_hash(const TabularMdp& mdp) { return hex64(fnv1a64(to_json(mdp).dump())); }

/// Planner values of one instance at the experiment's horizon and start state.
struct OracleValues {
    std::optional<double> optimal;
    std::vector<double> greedy;        // parallel to OracleSpec::greedy
    std::vector<double> thresholding;  // parallel to OracleSpec::thresholding
};

inline Json to_json(const OracleValues& v) {
    return {{"optimal", v.optimal ? Json(*v.optimal) : Json(nullptr)},
            {"greedy", v.greedy},
            {"thresholding", v.thresholding}};
}

inline OracleValues oracle_values_from_json(const Json& j) {
    OracleValues v;
    if (!j.at("optimal").is_null()) v.optimal = j["optimal"].get<double>();
    v.greedy = j.at("greedy").get<std::vector<double>>();
    v.thresholding = j.at("thresholding").get<std::vector<double>>();
    return v;
}

inline OracleValues compute_oracles(const TabularMdp& mdp, const OracleSpec& spec, std::size_t horizon, State s0) {
    OracleValues out;
    if (spec.optimal) out.optimal = optimal_initial_values(mdp, horizon)[s0];
    for (const auto k : spec.greedy) out.greedy.push_back(greedy_initial_values(mdp, k, horizon)[s0]);
    for (const auto& t : spec.thresholding)
        out.thresholding.push_back(thresholding_initial_values(mdp, t.k, t.gamma, horizon)[s0]);
    return out;
}

/**
 * Memoizes planner values by (instance content hash, query). With a
 * directory set, entries persist as JSON files so reruns skip planning.
 */
class OracleCache {
public:
    explicit OracleCache(std::filesystem::path directory = {}) : directory_(std::move(directory)) {}

    OracleValues get(const TabularMdp& mdp, const OracleSpec& spec, std::size_t horizon, State s0) {
        const Json query = {{"horizon", horizon}, {"initial_state", s0}, {"oracles", to_json(spec)}};
        const std::string key = instance_hash(mdp) + "-" + hex64(fnv1a64(query.dump()));
        {
            std::lock_guard lock(mutex_);
            if (const auto it = memory_.find(key); it != memory_.end()) {
                ++hits_;
                return it->second;
            }
        }
        std::optional<OracleValues> values;
        const auto file = directory_.empty() ? std::filesystem::path{} : directory_ / (key + ".json");
        if (!file.empty() && std::filesystem::exists(file)) {
            try {
                values = oracle_values_from_json(Json::parse(read_file(file)));
            } catch (const std::exception&) {
                values.reset();
            }
        }
        if (values) {
            std::lock_guard lock(mutex_);
            ++hits_;
        } else {
            values = compute_oracles(mdp, spec, horizon, s0);
            if (!file.empty()) write_atomic(file, to_json(*values).dump(1) + "\n");
            std::lock_guard lock(mutex_);
            ++misses_;
        }
        std::lock_guard lock(mutex_);
        memory_.emplace(key, *values);
        return *values;
    }

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    std::filesystem::path directory_;
    std::mutex mutex_;
    std::map<std::string, OracleValues> memory_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

}  // namespace lookahead::harness
