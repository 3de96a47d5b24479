#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stlfalsify/constraints/constraints.hpp"
#include "stlfalsify/grammar/grammar.hpp"
#include "stlfalsify/random.hpp"
#include "stlfalsify/samplers/model.hpp"
#include "stlfalsify/sim/scenario.hpp"
#include "stlfalsify/stl/text.hpp"

namespace stlf {

struct GpConfig {
    std::size_t population = 1000;
    std::size_t generations = 30;
    double p_reproduce = 0.3;
    double p_crossover = 0.3;
    double p_mutate = 0.4;
    std::size_t tournament_size = 7;
    std::size_t samples_per_eval = 10;
    std::size_t max_depth = kMaxDepth;
    std::uint64_t seed = 0;

    void validate() const {
        if (population < 1 || generations < 1 || tournament_size < 1 || samples_per_eval < 1 || max_depth < 2)
            throw std::invalid_argument("gp config: counts must be >= 1 (max_depth >= 2)");
        if (p_reproduce < 0 || p_crossover < 0 || p_mutate < 0 ||
            std::abs(p_reproduce + p_crossover + p_mutate - 1.0) > 1e-9)
            throw std::invalid_argument("gp config: operator probabilities must be nonnegative and sum to 1");
    }
};

struct EvaluationStats {
    std::size_t samples = 0;
    std::size_t failures = 0;
    std::size_t infeasible = 0;  // samples whose constraints never compiled
    double mean_fail_log_likelihood = -std::numeric_limits<double>::infinity();

    double fail_fraction() const { return samples ? static_cast<double>(failures) / static_cast<double>(samples) : 0.0; }
};

/// How costs are ordered. Discrete models compare -mean(p * 1{fail}) directly;
/// continuous ones compare (fail fraction, mean failure log-likelihood) lexicographically.
enum class Ranking { Probability, LogLikelihood };

struct Individual {
    Formula formula;
    double cost = 0.0;  // worst = 0
    bool feasible = false;
    EvaluationStats stats;
};

inline bool better(const Individual& a, const Individual& b, Ranking r) {
    if (r == Ranking::Probability) return a.cost < b.cost;
    if (a.stats.failures * b.stats.samples != b.stats.failures * a.stats.samples)
        return a.stats.fail_fraction() > b.stats.fail_fraction();
    return a.stats.mean_fail_log_likelihood > b.stats.mean_fail_log_likelihood;
}

inline Ranking ranking_for(const DisturbanceModel& model) {
    return model.discrete() ? Ranking::Probability : Ranking::LogLikelihood;
}

/// Cost of a formula: sample N traces satisfying it, roll them out, and score failures.
template <class URBG>
Individual evaluate_cost(const Formula& formula, const sim::Scenario& scenario, const DisturbanceModel& model,
                         std::size_t n, URBG& rng) {
    if (n < 1) throw std::invalid_argument("evaluate_cost: N must be >= 1");
    auto channels = scenario.channels();
    if (channels.size() != model.channels.size())
        throw std::invalid_argument("evaluate_cost: scenario and model channels differ");
    for (const auto& c : channels) require_channel(model.channels, c.id);

    const std::size_t m = scenario.horizon();
    Formula root = as_scalar(formula, m);
    Individual ind{formula, 0.0, false, {}};
    ind.stats.samples = n;
    double prob_sum = 0.0, ll_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto cs = sample_feasible_constraints(root, channels, m, rng);
        if (!cs) {
            ++ind.stats.infeasible;
            continue;
        }
        SignalTrace trace = sample_trace(model, m, scenario.dt(), &*cs, rng);
        if (!scenario.run(trace).failure) continue;
        double ll = log_likelihood(model, trace);
        ++ind.stats.failures;
        ll_sum += ll;
        prob_sum += std::exp(ll);
    }
    ind.feasible = ind.stats.infeasible < n;
    if (ind.stats.failures > 0) ind.stats.mean_fail_log_likelihood = ll_sum / static_cast<double>(ind.stats.failures);
    ind.cost = ranking_for(model) == Ranking::Probability ? -prob_sum / static_cast<double>(n) : -ind.stats.fail_fraction();
    return ind;
}

struct GenerationRecord {
    std::size_t generation = 0;
    double best_cost = 0.0;  // best so far
    double best_fail_fraction = 0.0;
    double best_log_likelihood = 0.0;
    double mean_cost = 0.0;  // this generation
    std::string best_formula;
};

struct OptimizeResult {
    Individual best;
    std::vector<GenerationRecord> history;
    std::size_t evaluations = 0;  // distinct formulas evaluated
};

/// Genetic programming over formulas. `progress` (optional) sees each generation record.
inline OptimizeResult run_optimizer(const GrammarSpec& grammar, const sim::Scenario& scenario,
                                    const DisturbanceModel& model, const GpConfig& cfg,
                                    const std::function<void(const GenerationRecord&)>& progress = {}) {
    cfg.validate();
    grammar.validate();
    const Ranking ranking = ranking_for(model);
    Rng rng = derive_stream(cfg.seed, {0});

    std::vector<Formula> population;
    population.reserve(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i)
        population.push_back(sample_expression(grammar, NodeType::Bool, cfg.max_depth, rng));

    std::unordered_map<std::string, Individual> cache;
    std::optional<Individual> best;
    OptimizeResult out{Individual{population.front(), 0.0, false, {}}, {}, 0};

    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        std::vector<const Individual*> scored;
        scored.reserve(population.size());
        double cost_sum = 0.0;
        for (std::size_t slot = 0; slot < population.size(); ++slot) {
            std::string key = canonical_text(population[slot]);
            auto it = cache.find(key);
            if (it == cache.end()) {
                Rng stream = derive_stream(cfg.seed, {1, gen, slot});
                it = cache.emplace(key, evaluate_cost(population[slot], scenario, model, cfg.samples_per_eval, stream)).first;
                ++out.evaluations;
            }
            scored.push_back(&it->second);
            cost_sum += it->second.cost;
            if (!best || better(it->second, *best, ranking)) best = it->second;
        }

        GenerationRecord rec{gen, best->cost, best->stats.fail_fraction(), best->stats.mean_fail_log_likelihood,
                             cost_sum / static_cast<double>(scored.size()), canonical_text(best->formula)};
        out.history.push_back(rec);
        if (progress) progress(rec);
        if (gen + 1 == cfg.generations) break;

        auto tournament = [&]() -> const Individual& {
            const Individual* win = nullptr;
            for (std::size_t k = 0; k < cfg.tournament_size; ++k) {
                const Individual* c = scored[uniform_index(scored.size(), rng)];
                if (!win || better(*c, *win, ranking)) win = c;
            }
            return *win;
        };

        std::vector<Formula> next;
        next.reserve(cfg.population);
        for (std::size_t slot = 0; slot < cfg.population; ++slot) {
            double u = uniform01(rng);
            if (u < cfg.p_reproduce) {
                next.push_back(tournament().formula);
            } else if (u < cfg.p_reproduce + cfg.p_crossover) {
                const Formula& a = tournament().formula;
                const Formula& b = tournament().formula;
                next.push_back(crossover(a, b, rng, cfg.max_depth));
            } else {
                next.push_back(mutate(tournament().formula, grammar, rng, cfg.max_depth));
            }
        }
        population = std::move(next);
    }
    out.best = *best;
    return out;
}

}  // namespace stlf
