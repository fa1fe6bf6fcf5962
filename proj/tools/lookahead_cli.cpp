// Command-line front end: generate, plan, run, aggregate, ablate.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lookahead/harness/config.hpp"
#include "lookahead/harness/presets.hpp"
#include "lookahead/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace lookahead;
using namespace lookahead::harness;

namespace {

struct CommonOptions {
    std::string config;
    std::string preset;
    std::string out;
    std::optional<long long> seeds;
    std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "Experiment config (JSON)");
    cmd->add_option("--preset", o.preset, "Built-in experiment")->check(CLI::IsMember(preset_names()));
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seeds", o.seeds, "Repetitions per (instance, agent)");
    cmd->add_option("--jobs", o.jobs, "Worker threads");
}

ExperimentConfig resolve(const CommonOptions& o) {
    if (o.config.empty() == o.preset.empty()) throw std::invalid_argument("give exactly one of --config or --preset");
    ExperimentConfig c = o.config.empty() ? preset(o.preset) : load_config(o.config);
    if (o.seeds) {
        if (*o.seeds < 1) throw std::invalid_argument("--seeds must be at least 1");
        c.seeds.count = static_cast<std::size_t>(*o.seeds);
    }
    if (o.jobs) c.jobs = *o.jobs;
    if (!o.out.empty()) c.output_dir = o.out;
    apply_environment_overrides(c);
    validate(c);
    return c;
}

void print_failures(const ExperimentResult& r) {
    for (const auto& f : r.failures) std::cerr << "run failed: " << f << "\n";
}

int cmd_generate(const CommonOptions& o) {
    const auto c = resolve(o);
    const auto instances = build_instances(c);
    const fs::path dir = fs::path(c.output_dir) / "instances";
    Json index = Json::array();
    for (const auto& inst : instances) {
        char name[32];
        std::snprintf(name, sizeof name, "instance_%04zu.json", inst.index);
        write_atomic(dir / name, to_json(inst.mdp).dump() + "\n");
        index.push_back({{"index", inst.index}, {"file", name}, {"hash", inst.hash}});
    }
    write_atomic(dir / "index.json", index.dump(2) + "\n");
    std::cout << "wrote " << instances.size() << " instance(s) to " << dir.string() << "\n";
    return 0;
}

int cmd_plan(const CommonOptions& o) {
    const auto c = resolve(o);
    const auto instances = build_instances(c);
    OracleCache cache(fs::path(c.output_dir) / "oracles");
    Json out = Json::array();
    for (const auto& inst : instances) {
        const auto v = cache.get(inst.mdp, c.oracles, c.horizon, c.initial_state);
        std::cout << "instance " << inst.index << " (" << inst.hash << "), T=" << c.horizon << ", s0=" << c.initial_state
                  << "\n";
        if (v.optimal) std::cout << "  V*            = " << format_number(*v.optimal) << "\n";
        for (std::size_t g = 0; g < v.greedy.size(); ++g) {
            const auto k = c.oracles.greedy[g];
            std::cout << "  V^greedy(K=" << k << ") = " << format_number(v.greedy[g]);
            if (v.optimal) {
                std::cout << "  gap = " << format_number(*v.optimal - v.greedy[g]);
                if (*v.optimal > 0.0) std::cout << "  ratio = " << format_number(v.greedy[g] / *v.optimal);
            }
            std::cout << "\n";
        }
        for (std::size_t g = 0; g < v.thresholding.size(); ++g)
            std::cout << "  V^threshold(K=" << c.oracles.thresholding[g].k << ") = " << format_number(v.thresholding[g])
                      << "\n";
        out.push_back({{"index", inst.index}, {"hash", inst.hash}, {"oracles", to_json(v)}});
    }
    write_atomic(fs::path(c.output_dir) / "plan.json", out.dump(2) + "\n");
    return 0;
}

int cmd_run(const CommonOptions& o) {
    const auto c = resolve(o);
    const auto r = run_experiment(c);
    print_failures(r);
    std::cout << r.runs - r.failures.size() << "/" << r.runs << " runs completed; results in " << r.directory.string()
              << "\n";
    return r.failures.empty() ? 0 : 3;
}

int cmd_aggregate(const std::string& dir) {
    const auto report = aggregate(dir);
    for (const auto& m : report.missing) std::cerr << "missing or unreadable: " << m << "\n";
    std::cout << report.rows << " summary rows written to " << (fs::path(dir) / "summary.csv").string() << "\n";
    return 0;
}

int cmd_ablate(const CommonOptions& o, const std::vector<double>& gammas) {
    auto c = resolve(o);
    c.agents = expand_thresholds(c.agents, gammas);
    validate(c);
    if (o.out.empty()) c.output_dir += "-ablate";
    const auto r = run_experiment(c);
    print_failures(r);
    std::cout << c.agents.size() << " agent variants, " << r.runs << " runs; results in " << r.directory.string()
              << "\n";
    return r.failures.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lookahead thresholding experiments"};
    app.require_subcommand(1);

    CommonOptions generate_opts, plan_opts, run_opts, ablate_opts;
    auto* generate = app.add_subcommand("generate", "Write environment instances as JSON");
    add_common(generate, generate_opts);
    auto* plan = app.add_subcommand("plan", "Compute planner values for each instance");
    add_common(plan, plan_opts);
    auto* run = app.add_subcommand("run", "Run all (instance, agent, seed) combinations");
    add_common(run, run_opts);
    std::string aggregate_dir;
    auto* agg = app.add_subcommand("aggregate", "Rebuild summary and curve CSVs from a result directory");
    agg->add_option("--out,dir", aggregate_dir, "Result directory")->required();
    std::vector<double> gammas{0.1, 0.3, 0.5, 0.9};
    auto* ablate = app.add_subcommand("ablate", "Sweep the threshold of every thresholding agent");
    add_common(ablate, ablate_opts);
    ablate->add_option("--gammas", gammas, "Threshold values")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) return cmd_generate(generate_opts);
        if (*plan) return cmd_plan(plan_opts);
        if (*run) return cmd_run(run_opts);
        if (*agg) return cmd_aggregate(aggregate_dir);
        if (*ablate) return cmd_ablate(ablate_opts, gammas);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
