#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "stlfalsify/baseline/baseline.hpp"
#include "stlfalsify/io/csv.hpp"
#include "stlfalsify/io/json.hpp"
#include "stlfalsify/optimize/optimize.hpp"
#include "stlfalsify/sim/scenario.hpp"
#include "stlfalsify/stl/evaluate.hpp"
#include "stlfalsify/stl/natural_language.hpp"
#include "stlfalsify/stl/text.hpp"

namespace stlf::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInfeasible = 3 };

/// Bad flags, config, or input files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string scenario;  // lt1..pc2 or path to a scenario JSON file
    std::uint64_t seed = 0;
    std::size_t trials = 500;
    GpConfig gp{};
    std::filesystem::path out_dir = "out";
    std::string formula;
    std::filesystem::path trace;
    std::size_t count = 10;
    std::size_t keep_rollouts = 5;
    bool quiet = false;
};

/// Merge a JSON config file into `cfg`. Keys mirror the flag names.
inline void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    try {
        cfg.scenario = j.value("scenario", cfg.scenario);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.trials = j.value("trials", cfg.trials);
        cfg.out_dir = j.value("out", cfg.out_dir.string());
        cfg.formula = j.value("formula", cfg.formula);
        cfg.count = j.value("count", cfg.count);
        cfg.keep_rollouts = j.value("keep_rollouts", cfg.keep_rollouts);
        auto& g = cfg.gp;
        g.population = j.value("pop", g.population);
        g.generations = j.value("gens", g.generations);
        g.p_reproduce = j.value("p_reproduce", g.p_reproduce);
        g.p_crossover = j.value("p_crossover", g.p_crossover);
        g.p_mutate = j.value("p_mutate", g.p_mutate);
        g.tournament_size = j.value("tournament_size", g.tournament_size);
        g.samples_per_eval = j.value("samples_per_eval", g.samples_per_eval);
        g.max_depth = j.value("max_depth", g.max_depth);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
}

/// Built-in id, or a JSON file {"kind": "left_turn"|"crosswalk", "base": "<preset>", ...overrides}.
inline sim::Scenario resolve_scenario(const std::string& id) {
    if (id.empty()) throw ConfigError("missing --scenario (lt1, lt2, lt3, pc1, pc2, or a scenario JSON file)");
    if (id == "lt1" || id == "lt2" || id == "lt3" || id == "pc1" || id == "pc2") return sim::builtin_scenario(id);
    std::ifstream in(id);
    if (!in) throw ConfigError("unknown scenario '" + id + "'");
    try {
        nlohmann::json j;
        in >> j;
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "left_turn") {
            auto c = sim::left_turn_preset(j.value("base", std::string("lt1")));
            c.name = j.value("name", std::filesystem::path(id).stem().string());
            c.s_ego = j.value("s_ego", c.s_ego);
            c.v_ego = j.value("v_ego", c.v_ego);
            c.s_adv = j.value("s_adv", c.s_adv);
            c.v_adv = j.value("v_adv", c.v_adv);
            c.dt = j.value("dt", c.dt);
            c.horizon = j.value("horizon", c.horizon);
            c.turn_radius = j.value("turn_radius", c.turn_radius);
            c.curve_speed = j.value("curve_speed", c.curve_speed);
            c.commit_buffer = j.value("commit_buffer", c.commit_buffer);
            c.adversary_turn_speed = j.value("adversary_turn_speed", c.adversary_turn_speed);
            return sim::Scenario(c);
        }
        if (kind == "crosswalk") {
            auto c = sim::crosswalk_preset(j.value("base", std::string("pc1")));
            c.name = j.value("name", std::filesystem::path(id).stem().string());
            c.sigma_acc = j.value("sigma_acc", c.sigma_acc);
            c.sigma_pos = j.value("sigma_pos", c.sigma_pos);
            c.sigma_vel = j.value("sigma_vel", c.sigma_vel);
            c.length_scale = j.value("length_scale", c.length_scale);
            c.dt = j.value("dt", c.dt);
            c.horizon = j.value("horizon", c.horizon);
            c.ego_x = j.value("ego_x", c.ego_x);
            c.ego_v = j.value("ego_v", c.ego_v);
            c.ped_y = j.value("ped_y", c.ped_y);
            c.ped_vy = j.value("ped_vy", c.ped_vy);
            return sim::Scenario(c);
        }
        throw ConfigError("scenario file " + id + ": kind must be left_turn or crosswalk");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scenario file " + id + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("scenario file " + id + ": " + e.what());
    }
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

inline std::string rollout_name(std::size_t i) {
    std::ostringstream s;
    s << "failure_" << std::setw(3) << std::setfill('0') << i << ".csv";
    return s.str();
}

inline Formula parse_for(const sim::Scenario& sc, const std::string& text) {
    if (text.empty()) throw ConfigError("missing --formula");
    auto channels = sc.channels();
    ParseContext ctx{&channels, sc.horizon()};
    Formula f = parse(text, ctx);
    check_formula(f, channels, sc.horizon());
    return f;
}

inline int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    sim::Scenario sc = resolve_scenario(cfg.scenario);
    GpConfig gp = cfg.gp;
    gp.seed = cfg.seed;
    try {
        gp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.trials < 1) throw ConfigError("--trials must be >= 1");

    auto channels = sc.channels();
    GrammarSpec grammar = GrammarSpec::standard(channels, sc.horizon() - 1);
    DisturbanceModel model = sc.true_model();
    std::string history;
    auto progress = [&](const GenerationRecord& g) {
        history += io::to_json(g).dump() + "\n";
        if (!cfg.quiet)
            log << "generation " << g.generation << "  best " << g.best_cost << "  fail " << g.best_fail_fraction
                << "  " << g.best_formula << "\n";
    };
    OptimizeResult res = run_optimizer(grammar, sc, model, gp, progress);

    RenderOptions opt{sc.dt(), &channels};
    Rng rng = derive_stream(cfg.seed, {2});
    BaselineResult eval = evaluate_expression(res.best.formula, sc, model, cfg.trials, rng, cfg.keep_rollouts);

    nlohmann::json result = {{"scenario", sc.name()},
                             {"seed", cfg.seed},
                             {"config", io::to_json(gp)},
                             {"evaluations", res.evaluations},
                             {"best", io::to_json(res.best, opt)}};
    write_file(cfg.out_dir / "result.json", result.dump(2) + "\n");
    write_file(cfg.out_dir / "history.jsonl", history);
    nlohmann::json report = io::to_json(eval.report);
    report["formula"] = canonical_text(res.best.formula);
    report["scenario"] = sc.name();
    write_file(cfg.out_dir / "report.json", report.dump(2) + "\n");
    for (std::size_t i = 0; i < eval.failures.size(); ++i)
        write_file(cfg.out_dir / "rollouts" / rollout_name(i), io::rollout_to_csv(eval.failures[i]));

    out << canonical_text(res.best.formula) << "\n"
        << render_natural_language(res.best.formula, opt) << "\n"
        << "fail rate " << eval.report.fail_rate << " +/- " << eval.report.fail_rate_std_error << " over "
        << eval.report.trials << " trials\n";
    return kOk;
}

inline int cmd_baseline(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    sim::Scenario sc = resolve_scenario(cfg.scenario);
    if (cfg.trials < 1) throw ConfigError("--trials must be >= 1");
    Rng rng = derive_stream(cfg.seed, {3});
    BaselineResult r = importance_sample(sc, sc.proposal_model(), cfg.trials, rng, cfg.keep_rollouts);
    nlohmann::json report = io::to_json(r.report);
    report["scenario"] = sc.name();
    report["seed"] = cfg.seed;
    write_file(cfg.out_dir / "report.json", report.dump(2) + "\n");
    for (std::size_t i = 0; i < r.failures.size(); ++i)
        write_file(cfg.out_dir / "rollouts" / rollout_name(i), io::rollout_to_csv(r.failures[i]));
    out << report.dump(2) << "\n";
    return kOk;
}

inline int cmd_monitor(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.trace.empty()) throw ConfigError("missing --trace");
    std::ifstream in(cfg.trace);
    if (!in) throw ConfigError("cannot read trace " + cfg.trace.string());
    std::optional<sim::Scenario> sc;
    if (!cfg.scenario.empty()) sc = resolve_scenario(cfg.scenario);
    std::optional<ChannelList> channels;
    if (sc) channels = sc->channels();
    SignalTrace trace = io::trace_from_csv(in, channels ? &*channels : nullptr);
    ParseContext ctx{&trace.channels(), trace.horizon()};
    if (cfg.formula.empty()) throw ConfigError("missing --formula");
    Formula f = as_scalar(parse(cfg.formula, ctx), trace.horizon());
    bool verdict = evaluate(f, trace);
    out << (verdict ? "True" : "False") << "\n"
        << render_natural_language(f, {trace.dt(), &trace.channels()}) << "\n";
    return kOk;
}

inline int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    sim::Scenario sc = resolve_scenario(cfg.scenario);
    Formula f = as_scalar(parse_for(sc, cfg.formula), sc.horizon());
    if (cfg.count < 1) throw ConfigError("--count must be >= 1");
    auto channels = sc.channels();
    DisturbanceModel model = sc.true_model();
    Rng rng = derive_stream(cfg.seed, {4});
    for (std::size_t i = 0; i < cfg.count; ++i) {
        auto cs = sample_feasible_constraints(f, channels, sc.horizon(), rng);
        if (!cs) {
            log << "formula is infeasible: no satisfiable constraint set after " << kConstraintAttempts << " attempts\n";
            return kInfeasible;
        }
        SignalTrace trace = sample_trace(model, sc.horizon(), sc.dt(), &*cs, rng);
        std::ostringstream name;
        name << "sample_" << std::setw(3) << std::setfill('0') << i;
        write_file(cfg.out_dir / (name.str() + ".csv"), io::trace_to_csv(trace));
        write_file(cfg.out_dir / (name.str() + ".constraints.json"), io::to_json(*cs).dump() + "\n");
        out << name.str() << ".csv " << (evaluate(f, trace) ? "True" : "False") << "\n";
    }
    return kOk;
}

}  // namespace stlf::cli
