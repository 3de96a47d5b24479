#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stlfalsify/constraints/constraints.hpp"
#include "stlfalsify/random.hpp"
#include "stlfalsify/samplers/model.hpp"
#include "stlfalsify/sim/scenario.hpp"

namespace stlf {

struct MeanWithError {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;
};

/// Sample mean and sample-std / sqrt(count).
inline MeanWithError mean_with_error(const std::vector<double>& xs) {
    MeanWithError r;
    r.count = xs.size();
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) {
        r.std_error = 0.0;
        return r;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    return r;
}

struct MetricReport {
    std::string method;  // "importance_sampling" or "expression"
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t infeasible_trials = 0;
    bool infeasible = false;  // no trial produced a trace
    double fail_rate = 0.0;
    double fail_rate_std_error = 0.0;
    std::string likelihood_kind;  // what `likelihood` measures
    MeanWithError likelihood;     // over failure trajectories, scored under the true model
    MeanWithError arithmetic_step_probability;  // discrete models only
};

struct BaselineResult {
    MetricReport report;
    std::vector<sim::SimResult> failures;  // up to `keep` failure rollouts
};

namespace detail {

class FailureTally {
public:
    FailureTally(const DisturbanceModel& truth, std::size_t trials, std::size_t keep)
        : truth_(truth), discrete_(truth.discrete()), keep_(keep) {
        report.trials = trials;
        report.likelihood_kind = discrete_ ? "geometric-mean per-step disturbance probability"
                                           : "trajectory log-likelihood";
    }

    void add(sim::SimResult&& r, std::size_t steps) {
        if (!r.failure) return;
        ++report.failures;
        double ll = log_likelihood(truth_, r.disturbances);
        if (discrete_) {
            likelihood_.push_back(std::exp(ll / static_cast<double>(steps)));
            double mean_p = 0.0;
            const auto& probs = std::get<CategoricalModel>(truth_.models[0]).probabilities;
            for (std::size_t i = 0; i < steps; ++i) mean_p += probs[r.disturbances.symbol(0, i)];
            arithmetic_.push_back(mean_p / static_cast<double>(steps));
        } else {
            likelihood_.push_back(ll);
        }
        if (kept.size() < keep_) kept.push_back(std::move(r));
    }

    MetricReport finish() {
        std::size_t n = report.trials - report.infeasible_trials;
        report.infeasible = n == 0;
        if (n > 0) {
            double p = static_cast<double>(report.failures) / static_cast<double>(n);
            report.fail_rate = p;
            report.fail_rate_std_error = std::sqrt(p * (1 - p) / static_cast<double>(n));
        }
        report.likelihood = mean_with_error(likelihood_);
        if (discrete_) report.arithmetic_step_probability = mean_with_error(arithmetic_);
        return report;
    }

    MetricReport report;
    std::vector<sim::SimResult> kept;

private:
    const DisturbanceModel& truth_;
    bool discrete_;
    std::size_t keep_;
    std::vector<double> likelihood_, arithmetic_;
};

inline void check_proposal(const DisturbanceModel& truth, const DisturbanceModel& proposal) {
    if (truth.channels.size() != proposal.channels.size())
        throw std::invalid_argument("proposal: channel structure differs from the true model");
    for (std::size_t j = 0; j < truth.channels.size(); ++j) {
        if (truth.channels[j].id != proposal.channels[j].id ||
            truth.channels[j].is_categorical() != proposal.channels[j].is_categorical())
            throw std::invalid_argument("proposal: channel structure differs from the true model");
        const auto& t = truth.models[j];
        const auto& p = proposal.models[j];
        if (auto tc = std::get_if<CategoricalModel>(&t)) {
            const auto& pc = std::get<CategoricalModel>(p);
            for (std::size_t s = 0; s < tc->probabilities.size(); ++s)
                if (tc->probabilities[s] > 0 && !(pc.probabilities.at(s) > 0))
                    throw std::invalid_argument("proposal: support does not cover the true model");
        } else if (auto pu = std::get_if<UniformModel>(&p)) {
            auto tu = std::get_if<UniformModel>(&t);
            if (!tu || pu->lo > tu->lo || pu->hi < tu->hi)
                throw std::invalid_argument("proposal: support does not cover the true model");
        }
    }
}

}  // namespace detail

/// Sample traces from the proposal, roll out, and score failures under the true model.
template <class URBG>
BaselineResult importance_sample(const sim::Scenario& scenario, const DisturbanceModel& proposal, std::size_t trials,
                                 URBG& rng, std::size_t keep = 10) {
    if (trials < 1) throw std::invalid_argument("importance_sample: trials must be >= 1");
    DisturbanceModel truth = scenario.true_model();
    proposal.validate();
    detail::check_proposal(truth, proposal);
    detail::FailureTally tally(truth, trials, keep);
    tally.report.method = "importance_sampling";
    for (std::size_t i = 0; i < trials; ++i) {
        SignalTrace trace = sample_trace(proposal, scenario.horizon(), scenario.dt(), nullptr, rng);
        tally.add(scenario.run(trace), scenario.horizon());
    }
    return {tally.finish(), std::move(tally.kept)};
}

/// Sample traces satisfying the formula under `model` and report failure metrics.
template <class URBG>
BaselineResult evaluate_expression(const Formula& formula, const sim::Scenario& scenario, const DisturbanceModel& model,
                                   std::size_t trials, URBG& rng, std::size_t keep = 10) {
    if (trials < 1) throw std::invalid_argument("evaluate_expression: trials must be >= 1");
    auto channels = scenario.channels();
    check_formula(formula, channels, scenario.horizon());
    const std::size_t m = scenario.horizon();
    Formula root = as_scalar(formula, m);
    DisturbanceModel truth = scenario.true_model();
    detail::FailureTally tally(truth, trials, keep);
    tally.report.method = "expression";
    for (std::size_t i = 0; i < trials; ++i) {
        auto cs = sample_feasible_constraints(root, channels, m, rng);
        if (!cs) {
            ++tally.report.infeasible_trials;
            continue;
        }
        SignalTrace trace = sample_trace(model, m, scenario.dt(), &*cs, rng);
        tally.add(scenario.run(trace), m);
    }
    return {tally.finish(), std::move(tally.kept)};
}

}  // namespace stlf
