#include <iostream>

#include <CLI11.hpp>

#include "stlfalsify/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace stlf::cli;
    CLI::App app{"Search for likely failure trajectories described by temporal logic formulas"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials, pop, gens, samples;
    std::optional<std::string> scenario, out_dir;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario, "lt1, lt2, lt3, pc1, pc2, or a scenario JSON file");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--config", config_path, "JSON config file; flags override it");
    };

    auto* optimize = app.add_subcommand("optimize", "genetic search for a failure-inducing formula");
    common(optimize);
    optimize->add_option("--pop", pop, "population size");
    optimize->add_option("--gens", gens, "generations");
    optimize->add_option("--samples", samples, "constrained samples per cost evaluation");
    optimize->add_option("--trials", trials, "trials for re-evaluating the best formula");
    optimize->add_flag("--quiet", cfg.quiet, "no per-generation progress");

    auto* baseline = app.add_subcommand("baseline", "importance-sampling baseline");
    common(baseline);
    baseline->add_option("--trials", trials, "number of trials");

    auto* monitor = app.add_subcommand("monitor", "evaluate a formula on a trace CSV");
    common(monitor);
    monitor->add_option("--formula", cfg.formula, "formula text")->required();
    monitor->add_option("--trace", cfg.trace, "trace CSV with header t,<channel>...")->required();

    auto* sample = app.add_subcommand("sample", "emit traces that satisfy a formula");
    common(sample);
    sample->add_option("--formula", cfg.formula, "formula text")->required();
    sample->add_option("--count", cfg.count, "number of traces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg);
        if (scenario) cfg.scenario = *scenario;
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;
        if (trials) cfg.trials = *trials;
        if (pop) cfg.gp.population = *pop;
        if (gens) cfg.gp.generations = *gens;
        if (samples) cfg.gp.samples_per_eval = *samples;

        if (optimize->parsed()) return cmd_optimize(cfg, std::cout, std::cerr);
        if (baseline->parsed()) return cmd_baseline(cfg, std::cout, std::cerr);
        if (monitor->parsed()) return cmd_monitor(cfg, std::cout, std::cerr);
        return cmd_sample(cfg, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const stlf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
