#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lookahead/agents/factory.hpp"
#include "lookahead/environments.hpp"
#include "lookahead/harness/config.hpp"
#include "lookahead/harness/io.hpp"
#include "lookahead/harness/oracle_cache.hpp"
#include "lookahead/harness/thread_pool.hpp"
#include "lookahead/metrics.hpp"
#include "lookahead/serialization.hpp"
#include "lookahead/simulate.hpp"
#include "lookahead/theory.hpp"

namespace lookahead::harness {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::size_t kMaxCurvePoints = 2000;

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Seeds. Instance i and run (i, r) draw from disjoint SplitMix64 streams of
// the master seed, so every number depends only on (config, master seed).

inline std::uint64_t instance_seed(std::uint64_t master, std::size_t instance) {
    return derive_seed(derive_seed(master, 0), instance);
}

inline std::uint64_t run_seed(std::uint64_t master, std::size_t instance, std::size_t repetition) {
    return derive_seed(derive_seed(derive_seed(master, 1), instance), repetition);
}

// ---------------------------------------------------------------------------
// Instances

struct Instance {
    std::size_t index = 0;
    TabularMdp mdp;
    std::string hash;
};

inline std::string environment_label(const EnvironmentSpec& e) {
    if (e.name == "synthetic")
        return "synthetic-S" + std::to_string(e.num_states) + "-A" + std::to_string(e.num_actions);
    if (e.name == "jumpriverswim") return "jumpriverswim-" + std::to_string(e.rightmost + 1);
    if (e.name == "linear_gap")
        return "linear_gap-S" + std::to_string(e.num_states) + "-A" + std::to_string(e.num_actions) + "-K" +
               std::to_string(e.k);
    if (e.name == "instance_file") return "file-" + fs::path(e.path).stem().string();
    return e.name;
}

inline TabularMdp load_instance_file(const std::string& path) {
    const auto mdp = mdp_from_json(Json::parse(read_file(path)));
    const auto report = validate_mdp(mdp);
    if (!report.ok()) throw std::invalid_argument("instance file '" + path + "' is not a valid MDP");
    return mdp;
}

inline std::vector<Instance> build_instances(const ExperimentConfig& c) {
    const auto& e = c.environment;
    std::vector<Instance> out;
    for (std::size_t i = 0; i < e.instances; ++i) {
        Instance inst;
        inst.index = i;
        if (e.name == "synthetic") {
            RngStream rng(instance_seed(c.seeds.master, i));
            inst.mdp = gen_synthetic_mdp(e.num_states, e.num_actions, e.synthetic, rng);
        } else if (e.name == "jumpriverswim") {
            inst.mdp = jump_riverswim(e.rightmost);
        } else if (e.name == "frozenlake4x4") {
            inst.mdp = frozen_lake_4x4();
        } else if (e.name == "linear_gap") {
            inst.mdp = build_linear_gap_instance(e.num_states, e.num_actions, e.k);
        } else if (e.name == "instance_file") {
            inst.mdp = load_instance_file(e.path);
        } else {
            throw std::invalid_argument("unknown environment '" + e.name + "'");
        }
        if (c.initial_state >= inst.mdp.num_states())
            throw std::invalid_argument("config: initial_state is outside the environment");
        inst.hash = instance_hash(inst.mdp);
        out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-agent cost targets

inline std::vector<RegretSegment> regret_segments(const AgentConfig& a) {
    if (a.algorithm == "lg1t" || a.algorithm == "lg1t_rl") return {{1, a.gamma}};
    if (a.algorithm == "lgkt") return {{a.k, a.gamma}};
    if (a.algorithm == "lg1_2t") {
        if (a.change_time < 0) return {{2, a.tail_gamma}};
        return {{1, a.gamma, a.change_time}, {2, a.tail_gamma}};
    }
    return {};
}

inline std::size_t regret_depth(const std::vector<RegretSegment>& segments) {
    std::size_t k = 1;
    for (const auto& s : segments) k = std::max(k, s.k);
    return k;
}

/// Good-action assumption over the stretch of the run each segment covers.
inline GoodActionCheck check_assumption(const KStepRewardTable& table, const std::vector<RegretSegment>& segments,
                                        std::size_t horizon) {
    GoodActionCheck total;
    std::int64_t from = 0;
    for (const auto& seg : segments) {
        const auto part = check_good_action(table, seg.gamma, seg.k, horizon, from, seg.until);
        total.violations += part.violations;
        if (!total.witness && part.witness) total.witness = part.witness;
        if (seg.until == std::numeric_limits<std::int64_t>::max()) break;
        from = seg.until + 1;
    }
    total.holds = total.violations == 0;
    return total;
}

// ---------------------------------------------------------------------------
// Curves

/// Common subsampling grid: all of 0..T when short, else kMaxCurvePoints evenly spaced steps including 0 and T.
inline std::vector<std::size_t> curve_grid(std::size_t horizon) {
    const std::size_t n = std::min(kMaxCurvePoints, horizon + 1);
    std::vector<std::size_t> grid(n);
    if (n == horizon + 1) {
        for (std::size_t i = 0; i < n; ++i) grid[i] = i;
        return grid;
    }
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = static_cast<std::size_t>((static_cast<unsigned long long>(i) * horizon) / (n - 1));
    return grid;
}

// ---------------------------------------------------------------------------
// Output layout

inline fs::path run_stem(const fs::path& dir, const std::string& agent, std::size_t instance, std::size_t rep) {
    char name[64];
    std::snprintf(name, sizeof name, "i%04zu-s%04zu", instance, rep);
    return dir / "runs" / agent / name;
}

inline std::string record_csv(const RunRecord& run, const std::vector<double>& costs) {
    std::ostringstream out;
    out << "t,s,a,r,phase,cost\n";
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const auto& st = run.steps[i];
        out << st.t << ',' << st.s << ',' << st.a << ',' << format_number(st.r) << ',' << to_string(st.phase) << ',';
        if (!costs.empty()) out << format_number(costs[i]);
        out << '\n';
    }
    return out.str();
}

struct RunTask {
    std::size_t instance = 0;
    std::size_t agent = 0;
    std::size_t repetition = 0;
};

/// Executes one run and writes its metrics (and optionally its record).
inline void execute_run(const ExperimentConfig& c, const fs::path& dir, const Instance& inst,
                        const KStepRewardTable& table, const std::optional<double>& optimal, const RunTask& task) {
    const auto& agent_cfg = c.agents[task.agent];
    const auto label = agent_cfg.display_name();
    const auto seed = run_seed(c.seeds.master, task.instance, task.repetition);
    const auto& mdp = inst.mdp;
    auto agent = make_agent(agent_cfg, mdp.num_states(), mdp.num_actions(), c.horizon, agent_stream(seed));

    const auto segments = regret_segments(agent_cfg);
    RunMeta meta{agent_cfg.algorithm, environment_label(c.environment), seed, c.horizon,
                 segments.empty() ? 1 : segments.back().k, agent_cfg.gamma};
    const auto run = simulate(mdp, *agent, c.horizon, c.initial_state, environment_stream(seed), meta);
    if (!run.well_formed()) throw std::logic_error("run record is not well formed");

    const auto avg = running_average(run);
    std::vector<double> costs, regret;
    if (!segments.empty()) {
        costs = step_costs(run, table, segments);
        regret.resize(costs.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < costs.size(); ++i) regret[i] = sum += costs[i];
    }

    std::uint64_t phases[3] = {0, 0, 0};
    for (const auto& st : run.steps) ++phases[static_cast<int>(st.phase)];

    const auto grid = curve_grid(c.horizon);
    std::vector<double> avg_curve, regret_curve;
    avg_curve.reserve(grid.size());
    for (const auto t : grid) avg_curve.push_back(avg[t]);
    if (!regret.empty())
        for (const auto t : grid) regret_curve.push_back(regret[t]);

    const double total = cumulative_reward(run);
    Json m = {{"environment", meta.environment},
              {"agent", label},
              {"algorithm", agent_cfg.algorithm},
              {"instance", task.instance},
              {"repetition", task.repetition},
              {"seed", seed},
              {"horizon", c.horizon},
              {"cumulative_reward", total},
              {"final_running_average", avg.back()},
              {"final_regret", regret.empty() ? Json(nullptr) : Json(regret.back())},
              {"reward_ratio_to_optimal",
               optimal && *optimal > 0.0 ? Json(total / *optimal) : Json(nullptr)},
              {"phases", {{"exploit", phases[0]}, {"explore", phases[1]}, {"subroutine", phases[2]}}},
              {"curve", {{"t", grid}, {"running_average", avg_curve}, {"regret", regret_curve}}}};

    const auto stem = run_stem(dir, label, task.instance, task.repetition);
    if (c.write_records) {
        auto csv = stem;
        csv += ".csv";
        write_atomic(csv, record_csv(run, costs));
    }
    auto json = stem;
    json += ".json";
    write_atomic(json, m.dump() + "\n");
}

struct ExperimentResult {
    fs::path directory;
    std::size_t runs = 0;
    std::vector<std::string> failures;
};

struct AggregateReport {
    std::vector<std::string> missing;  // run files that were absent or unreadable
    std::size_t rows = 0;
};

inline AggregateReport aggregate(const fs::path& dir);

inline std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a64(to_json(c).dump())); }

/// Threshold sweep: every thresholding agent becomes one variant per gamma,
/// labelled "<name>@<gamma>". lg1_2t sweeps its second-phase threshold.
inline std::vector<AgentConfig> expand_thresholds(const std::vector<AgentConfig>& agents,
                                                  const std::vector<double>& gammas) {
    if (gammas.empty()) throw std::invalid_argument("threshold sweep needs at least one value");
    std::vector<AgentConfig> out;
    for (const auto& a : agents) {
        if (!a.is_thresholding()) {
            out.push_back(a);
            continue;
        }
        for (const double g : gammas) {
            AgentConfig v = a;
            v.label = a.display_name() + "@" + format_number(g);
            if (a.algorithm == "lg1_2t")
                v.tail_gamma = g;
            else
                v.gamma = g;
            out.push_back(std::move(v));
        }
    }
    return out;
}

/**
 * Runs every (instance, agent, repetition) of the config into c.output_dir.
 *
 * Writes per-run metrics under runs/, planner values under oracles/, a
 * manifest, and finally the aggregate CSVs. A failing run is recorded in the
 * manifest and does not stop the others.
 */
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
    validate(c);
    const fs::path dir = c.output_dir;
    fs::create_directories(dir);
    const auto instances = build_instances(c);

    std::size_t depth = 1;
    for (const auto& a : c.agents) depth = std::max(depth, regret_depth(regret_segments(a)));
    depth = std::min(depth, c.horizon + 1);

    OracleCache cache(dir / "oracles");
    std::vector<OracleValues> oracle(instances.size());
    std::vector<KStepRewardTable> tables(instances.size());
    parallel_for(instances.size(), c.jobs, [&](std::size_t i) {
        oracle[i] = cache.get(instances[i].mdp, c.oracles, c.horizon, c.initial_state);
        tables[i] = k_step_rewards(instances[i].mdp, depth);
    });

    std::vector<RunTask> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (std::size_t a = 0; a < c.agents.size(); ++a)
            for (std::size_t r = 0; r < c.seeds.count; ++r) tasks.push_back({i, a, r});

    std::vector<std::string> errors(tasks.size());
    parallel_for(tasks.size(), c.jobs, [&](std::size_t n) {
        const auto& task = tasks[n];
        try {
            execute_run(c, dir, instances[task.instance], tables[task.instance], oracle[task.instance].optimal, task);
        } catch (const std::exception& e) {
            errors[n] = e.what();
        }
    });

    ExperimentResult result{dir, tasks.size(), {}};
    Json failures = Json::array();
    for (std::size_t n = 0; n < tasks.size(); ++n) {
        if (errors[n].empty()) continue;
        const auto& t = tasks[n];
        const auto label = c.agents[t.agent].display_name();
        failures.push_back({{"agent", label}, {"instance", t.instance}, {"repetition", t.repetition},
                            {"error", errors[n]}});
        result.failures.push_back(label + " i" + std::to_string(t.instance) + " s" + std::to_string(t.repetition) +
                                  ": " + errors[n]);
    }

    Json flags = Json::array();
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (const auto& a : c.agents) {
            const auto segments = regret_segments(a);
            if (segments.empty()) continue;
            const auto check = check_assumption(tables[i], segments, c.horizon);
            if (check.holds) continue;
            flags.push_back({{"instance", i},
                             {"agent", a.display_name()},
                             {"violations", check.violations},
                             {"witness", {{"t", check.witness->first}, {"state", check.witness->second}}}});
        }

    Json inst = Json::array();
    for (std::size_t i = 0; i < instances.size(); ++i)
        inst.push_back({{"index", i}, {"hash", instances[i].hash}, {"oracles", to_json(oracle[i])}});
    Json agents = Json::array();
    for (const auto& a : c.agents) agents.push_back(a.display_name());

    const Json manifest = {{"tool", "lookahead"},
                           {"version", kVersion},
                           {"config_hash", config_hash(c)},
                           {"config", to_json(c)},
                           {"environment", environment_label(c.environment)},
                           {"agents", std::move(agents)},
                           {"instances", std::move(inst)},
                           {"repetitions", c.seeds.count},
                           {"runs", tasks.size()},
                           {"failures", std::move(failures)},
                           {"assumption_flags", std::move(flags)}};
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    aggregate(dir);
    return result;
}

// ---------------------------------------------------------------------------
// Aggregation

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double sum = 0.0;
    for (const double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi) {
        out.mean = *lo;  // exact for identical runs
        return out;
    }
    double ss = 0.0;
    for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    return out;
}

inline std::string summary_row(const std::string& env, const std::string& agent, const std::string& metric,
                               const MeanStderr& m) {
    return env + "," + agent + "," + metric + "," + format_number(m.mean) + "," + format_number(m.stderr_) + "," +
           std::to_string(m.n) + "\n";
}

/// Rebuilds summary.csv, curves.csv and regret_curves.csv from the run files
/// listed by the manifest. Missing or corrupt run files are reported, not fatal.
inline AggregateReport aggregate(const fs::path& dir) {
    const Json manifest = Json::parse(read_file(dir / "manifest.json"));
    const auto env = manifest.at("environment").get<std::string>();
    const auto agents = manifest.at("agents").get<std::vector<std::string>>();
    const auto& instances = manifest.at("instances");
    const auto reps = manifest.at("repetitions").get<std::size_t>();
    const auto& oracle_spec = manifest.at("config").at("oracles");

    AggregateReport report;
    std::string summary = "environment,agent,metric,mean,stderr,n\n";
    std::string curves = "environment,agent,t,mean,stderr\n";
    std::string regret_curves = "environment,agent,t,mean,stderr\n";

    for (const auto& agent : agents) {
        std::vector<double> reward, regret, final_avg, ratio;
        std::vector<std::vector<double>> avg_at, regret_at;
        std::vector<std::size_t> grid;
        for (std::size_t i = 0; i < instances.size(); ++i)
            for (std::size_t r = 0; r < reps; ++r) {
                auto file = run_stem(dir, agent, i, r);
                file += ".json";
                Json m;
                try {
                    m = Json::parse(read_file(file));
                    const auto& curve = m.at("curve");
                    const auto t = curve.at("t").get<std::vector<std::size_t>>();
                    const auto avg = curve.at("running_average").get<std::vector<double>>();
                    const auto reg = curve.at("regret").get<std::vector<double>>();
                    if (grid.empty()) {
                        grid = t;
                        avg_at.assign(grid.size(), {});
                        regret_at.assign(grid.size(), {});
                    }
                    if (t != grid || avg.size() != grid.size() || (!reg.empty() && reg.size() != grid.size()))
                        throw std::runtime_error("curve grid mismatch");
                    reward.push_back(m.at("cumulative_reward").get<double>());
                    final_avg.push_back(m.at("final_running_average").get<double>());
                    if (!m.at("final_regret").is_null()) regret.push_back(m["final_regret"].get<double>());
                    if (!m.at("reward_ratio_to_optimal").is_null())
                        ratio.push_back(m["reward_ratio_to_optimal"].get<double>());
                    for (std::size_t g = 0; g < grid.size(); ++g) {
                        avg_at[g].push_back(avg[g]);
                        if (!reg.empty()) regret_at[g].push_back(reg[g]);
                    }
                } catch (const std::exception&) {
                    report.missing.push_back(file.string());
                }
            }
        if (reward.empty()) continue;
        summary += summary_row(env, agent, "cumulative_reward", mean_stderr(reward));
        summary += summary_row(env, agent, "final_running_average", mean_stderr(final_avg));
        if (!regret.empty()) summary += summary_row(env, agent, "final_regret", mean_stderr(regret));
        if (!ratio.empty()) summary += summary_row(env, agent, "reward_ratio_to_optimal", mean_stderr(ratio));
        report.rows += 2 + (regret.empty() ? 0 : 1) + (ratio.empty() ? 0 : 1);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto m = mean_stderr(avg_at[g]);
            curves += env + "," + agent + "," + std::to_string(grid[g]) + "," + format_number(m.mean) + "," +
                      format_number(m.stderr_) + "\n";
            if (!regret_at[g].empty()) {
                const auto q = mean_stderr(regret_at[g]);
                regret_curves += env + "," + agent + "," + std::to_string(grid[g]) + "," + format_number(q.mean) +
                                 "," + format_number(q.stderr_) + "\n";
            }
        }
    }

    // Planner rows: values and competitive ratios V^pi_0 / V*_0 per instance.
    std::vector<double> optimal;
    for (const auto& inst : instances)
        if (!inst.at("oracles").at("optimal").is_null()) optimal.push_back(inst["oracles"]["optimal"].get<double>());
    const bool have_optimal = optimal.size() == instances.size();
    if (!optimal.empty()) summary += summary_row(env, "oracle_optimal", "value", mean_stderr(optimal));
    auto oracle_rows = [&](const std::string& name, const char* field, std::size_t idx) {
        std::vector<double> values, ratios;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const double v = instances[i].at("oracles").at(field).at(idx).get<double>();
            values.push_back(v);
            if (have_optimal && optimal[i] > 0.0) ratios.push_back(v / optimal[i]);
        }
        summary += summary_row(env, name, "value", mean_stderr(values));
        if (!ratios.empty()) summary += summary_row(env, name, "competitive_ratio", mean_stderr(ratios));
    };
    const auto greedy = oracle_spec.at("greedy").get<std::vector<std::size_t>>();
    for (std::size_t g = 0; g < greedy.size(); ++g) oracle_rows("oracle_greedy_k" + std::to_string(greedy[g]), "greedy", g);
    const auto& thresholds = oracle_spec.at("thresholding");
    for (std::size_t g = 0; g < thresholds.size(); ++g) {
        const auto& th = thresholds[g];
        std::string name = "oracle_threshold_k" + std::to_string(th.at("k").get<std::size_t>());
        if (th.at("gamma").is_number()) name += "_g" + format_number(th["gamma"].get<double>());
        else name += "_sched" + std::to_string(g);
        oracle_rows(name, "thresholding", g);
    }

    write_atomic(dir / "summary.csv", summary);
    write_atomic(dir / "curves.csv", curves);
    write_atomic(dir / "regret_curves.csv", regret_curves);
    return report;
}

}  // namespace lookahead::harness
