#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "stlfalsify/baseline/baseline.hpp"
#include "stlfalsify/constraints/constraints.hpp"
#include "stlfalsify/optimize/optimize.hpp"
#include "stlfalsify/stl/natural_language.hpp"
#include "stlfalsify/stl/text.hpp"

namespace stlf::io {

using nlohmann::json;

/// JSON number, or null for non-finite values.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const ConstraintSet& cs) {
    json out = json::object();
    for (std::size_t j = 0; j < cs.channels().size(); ++j) {
        const auto& spec = cs.channels()[j];
        json steps = json::array();
        if (spec.is_categorical()) {
            const auto& syms = spec.categorical_kind().symbols;
            for (auto mask : cs.mask(j).allowed) {
                json allowed = json::array();
                for (std::size_t s = 0; s < syms.size(); ++s)
                    if (mask >> s & 1U) allowed.push_back(syms[s]);
                steps.push_back(allowed);
            }
        } else {
            const auto& b = cs.bounds(j);
            for (std::size_t i = 0; i < cs.horizon(); ++i) steps.push_back(json::array({number(b.lo[i]), number(b.hi[i])}));
        }
        out[spec.id] = steps;
    }
    return out;
}

inline json to_json(const MeanWithError& m) {
    return {{"mean", number(m.mean)}, {"std_error", number(m.std_error)}, {"count", m.count}};
}

inline json to_json(const MetricReport& r) {
    json j = {{"method", r.method},
              {"trials", r.trials},
              {"failures", r.failures},
              {"infeasible_trials", r.infeasible_trials},
              {"infeasible", r.infeasible},
              {"fail_rate", r.fail_rate},
              {"fail_rate_std_error", r.fail_rate_std_error},
              {"likelihood_kind", r.likelihood_kind},
              {"likelihood", to_json(r.likelihood)}};
    if (r.arithmetic_step_probability.count > 0 || r.likelihood_kind.rfind("geometric", 0) == 0)
        j["arithmetic_mean_step_probability"] = to_json(r.arithmetic_step_probability);
    return j;
}

inline json to_json(const Individual& ind, const RenderOptions& opt) {
    return {{"formula", canonical_text(ind.formula)},
            {"natural_language", render_natural_language(ind.formula, opt)},
            {"depth", ind.formula.depth()},
            {"cost", number(ind.cost)},
            {"feasible", ind.feasible},
            {"samples", ind.stats.samples},
            {"failures", ind.stats.failures},
            {"infeasible_samples", ind.stats.infeasible},
            {"fail_fraction", ind.stats.fail_fraction()},
            {"mean_fail_log_likelihood", number(ind.stats.mean_fail_log_likelihood)}};
}

inline json to_json(const GenerationRecord& g) {
    return {{"generation", g.generation},
            {"best_cost", number(g.best_cost)},
            {"best_fail_fraction", g.best_fail_fraction},
            {"best_log_likelihood", number(g.best_log_likelihood)},
            {"mean_cost", number(g.mean_cost)},
            {"best_formula", g.best_formula}};
}

inline json to_json(const GpConfig& c) {
    return {{"population", c.population},
            {"generations", c.generations},
            {"p_reproduce", c.p_reproduce},
            {"p_crossover", c.p_crossover},
            {"p_mutate", c.p_mutate},
            {"tournament_size", c.tournament_size},
            {"samples_per_eval", c.samples_per_eval},
            {"max_depth", c.max_depth},
            {"seed", c.seed}};
}

}  // namespace stlf::io
