#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "zblow/config.hpp"
#include "zblow/scenario.hpp"

namespace {

enum Exit { Pass = 0, AssertionFailure = 1, ConfigFailure = 2, RuntimeFailure = 3 };

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::size_t> grid_n;
    std::optional<double> half_width;
    std::optional<double> t_end;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;

    void attach(CLI::App* app) {
        app->add_option("--out", out, "output directory");
        app->add_option("--grid-n", grid_n, "number of grid nodes (odd)");
        app->add_option("--half-width", half_width, "half-width of the spatial domain");
        app->add_option("--t-end", t_end, "final time");
        app->add_option("--threshold", threshold, "sup-norm blow-up threshold");
        app->add_option("--seed", seed, "seed for perturbed scenarios");
        app->add_option("--workers", workers, "worker threads for the field updates");
    }

    void apply(zblow::ScenarioConfig& c) const {
        if (out) c.output_dir = *out;
        if (grid_n) c.grid.n_points = *grid_n;
        if (half_width) c.grid.half_width = *half_width;
        if (t_end) c.solver.t_end = *t_end;
        if (threshold) c.solver.blowup_threshold = *threshold;
        if (seed) c.seed = *seed;
        if (workers) c.solver.workers = *workers;
    }
};

zblow::ScenarioConfig load(const std::string& path, const Overrides& o) {
    auto c = zblow::load_config(path);
    o.apply(c);
    c.validate();
    return c;
}

int cmd_list(const std::string& filter) {
    for (const auto& e : zblow::scenario_catalog()) {
        if (!filter.empty() && e.name.find(filter) == std::string::npos) continue;
        std::cout << e.name << "\n  " << e.description << "\n  verifies: " << e.verifies << "\n";
    }
    return Pass;
}

int cmd_validate(const std::string& path, const Overrides& o) {
    const auto c = load(path, o);
    std::cout << "ok: " << c.name << " -> " << c.output_dir << "\n";
    return Pass;
}

int cmd_run(const std::string& path, const Overrides& o) {
    const auto c = load(path, o);
    const auto report = zblow::run_scenario(c);
    zblow::write_outputs(report, c.output_dir);
    for (const auto& a : report.assertions) {
        std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " measured=" << zblow::format_double(a.measured)
                  << " tol=" << zblow::format_double(a.tolerance);
        if (!a.detail.empty()) std::cout << " (" << a.detail << ")";
        std::cout << "\n";
    }
    std::cout << (report.passed() ? "scenario passed" : "scenario failed") << " in "
              << report.wall_seconds << " s; outputs in " << c.output_dir << "\n";
    return report.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blow-up lab for z_t = z_xx + z^2"};
    app.require_subcommand(1);

    std::string config_path, filter;
    Overrides overrides;

    auto* run = app.add_subcommand("run", "run a scenario from a configuration file");
    run->add_option("config", config_path, "configuration file")->required();
    overrides.attach(run);

    auto* list = app.add_subcommand("list", "list the scenario catalog");
    list->add_option("filter", filter, "substring filter on names");

    auto* validate = app.add_subcommand("validate", "check a configuration without running it");
    validate->add_option("config", config_path, "configuration file")->required();
    overrides.attach(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Pass : ConfigFailure;
    }

    try {
        if (*list) return cmd_list(filter);
        if (*validate) return cmd_validate(config_path, overrides);
        return cmd_run(config_path, overrides);
    } catch (const zblow::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return RuntimeFailure;
    }
}
