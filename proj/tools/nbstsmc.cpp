// nbstsmc command-line simulator: run, compare, selftest.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <nbstsmc/nbstsmc.hpp>

namespace fs = std::filesystem;
using namespace nbstsmc;

namespace {

enum Exit : int { ok = 0, config_failure = 1, overflow = 2, identity_failure = 3 };

struct Manifest {
    std::string config_path;
    std::string out_path;
    std::string scenario;
    std::vector<std::string> overrides;
};

json load_document(const Manifest& m) {
    json doc = m.config_path.empty() ? json::object() : read_json_file(m.config_path);
    if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
    if (!m.scenario.empty()) doc["scenario"] = scenario_to_json(bundled_scenario(m.scenario));
    for (const auto& o : m.overrides) apply_override(doc, o);
    return doc;
}

SimulationSetup load_setup(const Manifest& m) {
    SimulationSetup setup = setup_from_json(load_document(m));
    const auto cfg_check = validate_config(setup.config);
    for (const auto& w : cfg_check.warnings) std::cerr << "warning: " << w.key << ": " << w.message << "\n";
    if (!cfg_check.ok()) throw ConfigError(cfg_check.errors.front().key, cfg_check.errors.front().message);
    const auto p_check = validate_perturbation(setup.perturbation);
    if (!p_check.ok()) throw ConfigError(p_check.errors.front().key, p_check.errors.front().message);
    return setup;
}

fs::path sidecar(const fs::path& csv) {
    fs::path p = csv;
    p += ".diag";
    return p;
}

void write_run(const Trajectory& traj, const fs::path& out) {
    write_file_atomic(out, trajectory_csv(traj));
    json diag = report_to_json(monitor_decrease(traj));
    diag["config"] = setup_to_json(traj.config, traj.perturbation);
    write_file_atomic(sidecar(out), diag.dump(2) + "\n");
}

int cmd_run(const Manifest& m) {
    const SimulationSetup setup = load_setup(m);
    const Trajectory traj = run_simulation(setup.config, setup.perturbation);
    write_run(traj, m.out_path);
    std::cout << "wrote " << traj.records.size() << " samples to " << m.out_path << "\n";
    return ok;
}

fs::path with_suffix(const fs::path& base, const std::string& tag) {
    fs::path p = base.parent_path() / base.stem();
    p += "_" + tag;
    p += base.extension().empty() ? fs::path(".csv") : base.extension();
    return p;
}

int cmd_compare(const Manifest& m) {
    const SimulationSetup setup = load_setup(m);
    if (setup.config.layer_count() < 2) throw ConfigError("layers", "compare needs at least two layers");

    ControllerConfig single = setup.config;
    single.layers = {setup.config.innermost()};

    auto single_run = std::async(std::launch::async, [&] { return run_simulation(single, setup.perturbation); });
    const Trajectory multi = run_simulation(setup.config, setup.perturbation);
    const Trajectory one = single_run.get();

    const fs::path base = m.out_path;
    const fs::path single_csv = with_suffix(base, "single");
    const fs::path multi_csv = with_suffix(base, "multi");
    write_run(one, single_csv);
    write_run(multi, multi_csv);

    auto summarize = [](const Trajectory& t, const fs::path& csv) {
        return json{{"csv", csv.string()},
                    {"layers", t.config.layers},
                    {"a0_activations_after_1s", a0_activations_after(t, 1.0)},
                    {"max_abs_s_after_1s", max_abs_s_after(t, 1.0)}};
    };
    const json summary{{"single", summarize(one, single_csv)}, {"multi", summarize(multi, multi_csv)}};
    fs::path summary_path = base.parent_path() / base.stem();
    summary_path += "_summary.json";
    write_file_atomic(summary_path, summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return ok;
}

int cmd_selftest(bool inject_fault) {
    SelftestOptions opts;
    opts.inject_k2_fault = inject_fault;
    const SelftestReport report = run_selftest(opts);
    for (const auto& c : report.checks) {
        std::printf("%-4s %-62s max residual %.3e (tol %.1e)\n", c.passed() ? "ok" : "FAIL", c.name.c_str(),
                    c.max_residual, c.tolerance);
    }
    for (const auto& c : report.checks) {
        if (!c.passed()) std::cerr << "identity failed: " << c.name << " worst point " << c.worst_point << "\n";
    }
    return report.passed() ? ok : identity_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested-barrier adaptive super-twisting simulator"};
    app.require_subcommand(1);

    Manifest manifest;
    bool inject_fault = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", manifest.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", manifest.overrides, "KEY=VALUE override (dotted keys for scenario.*)")
            ->allow_extra_args(false);
        sub->add_option("--scenario", manifest.scenario, "bundled scenario")
            ->check(CLI::IsMember({"steps", "sinusoid"}));
    };

    CLI::App* run = app.add_subcommand("run", "simulate one configuration and write a CSV plus .diag report");
    add_common(run);
    run->add_option("--out", manifest.out_path, "output CSV path")->required();

    CLI::App* compare = app.add_subcommand("compare", "single-layer vs full-layer runs of one scenario");
    add_common(compare);
    compare->add_option("--out", manifest.out_path, "output base path (_single/_multi/_summary)")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "run the algebraic identity grids");
    selftest->add_flag("--inject-fault", inject_fault, "perturb k2 away from k1^2 (test hook)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_failure;
    }

    try {
        if (*run) return cmd_run(manifest);
        if (*compare) return cmd_compare(manifest);
        return cmd_selftest(inject_fault);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_failure;
    } catch (const SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return overflow;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return config_failure;
    }
}
