#include <gtest/gtest.h>

#include "stlfalsify/baseline/baseline.hpp"
#include "stlfalsify/stl/text.hpp"
#include "support.hpp"

using namespace stlf;

TEST(MeanWithError, SampleStatistics) {
    MeanWithError m = mean_with_error({1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_NEAR(m.std_error, 0.6454972243679028, 1e-12);
    EXPECT_EQ(m.count, 4u);
    EXPECT_TRUE(std::isnan(mean_with_error({}).mean));
    EXPECT_EQ(mean_with_error({7}).std_error, 0.0);
}

TEST(ImportanceSampling, TrueModelRarelyFails) {
    auto sc = sim::builtin_scenario("lt1");
    Rng rng(1);
    BaselineResult r = importance_sample(sc, sc.true_model(), 2000, rng);
    EXPECT_LT(r.report.fail_rate, 0.01);
    EXPECT_EQ(r.report.method, "importance_sampling");
}

TEST(ImportanceSampling, UniformProposalLeftTurn) {
    auto sc = sim::builtin_scenario("lt1");
    Rng rng(2);
    BaselineResult r = importance_sample(sc, sc.proposal_model(), 500, rng, 3);
    EXPECT_LE(r.report.fail_rate, 0.05);
    EXPECT_EQ(r.report.trials, 500u);
    EXPECT_LE(r.failures.size(), 3u);
    EXPECT_EQ(r.report.likelihood_kind, "geometric-mean per-step disturbance probability");
    if (r.report.failures > 0) {
        EXPECT_GT(r.report.likelihood.mean, 0.0);
        EXPECT_LE(r.report.likelihood.mean, 1.0);
        EXPECT_EQ(r.report.arithmetic_step_probability.count, r.report.failures);
    }
    for (const auto& f : r.failures) EXPECT_TRUE(f.failure);
}

TEST(ImportanceSampling, CrosswalkRate) {
    auto sc = sim::builtin_scenario("pc1");
    Rng rng(3);
    BaselineResult r = importance_sample(sc, sc.proposal_model(), 500, rng);
    EXPECT_GE(r.report.fail_rate, 0.02);
    EXPECT_LE(r.report.fail_rate, 0.4);
    EXPECT_EQ(r.report.likelihood_kind, "trajectory log-likelihood");
    EXPECT_EQ(r.report.arithmetic_step_probability.count, 0u);
    EXPECT_NEAR(r.report.fail_rate_std_error,
                std::sqrt(r.report.fail_rate * (1 - r.report.fail_rate) / 500.0), 1e-12);
}

TEST(ImportanceSampling, ProposalMustCoverSupport) {
    auto sc = sim::builtin_scenario("lt1");
    DisturbanceModel bad = sc.true_model();
    std::get<CategoricalModel>(bad.models[0]).probabilities = {1, 0, 0, 0, 0, 0, 0};
    Rng rng(4);
    EXPECT_THROW(importance_sample(sc, bad, 10, rng), std::invalid_argument);
    EXPECT_THROW(importance_sample(sc, sc.proposal_model(), 0, rng), std::invalid_argument);
}

TEST(EvaluateExpression, InfeasibleFormula) {
    auto sc = sim::builtin_scenario("lt1");
    auto channels = sc.channels();
    Formula f = parse("(□_[0,0](adv = a_maj) ∧ □_[0,0](adv = none))", ParseContext{&channels, 20});
    Rng rng(5);
    BaselineResult r = evaluate_expression(f, sc, sc.true_model(), 4, rng);
    EXPECT_TRUE(r.report.infeasible);
    EXPECT_EQ(r.report.infeasible_trials, 4u);
    EXPECT_EQ(r.report.failures, 0u);
}

TEST(EvaluateExpression, PinnedTraceLikelihood) {
    auto sc = sim::builtin_scenario("lt1");
    auto channels = sc.channels();
    Formula f = parse("(□_[0,2](adv = a_maj) ∧ □_[3,19](adv = none))", ParseContext{&channels, 20});
    Rng rng(6);
    BaselineResult r = evaluate_expression(f, sc, sc.true_model(), 5, rng);
    EXPECT_EQ(r.report.fail_rate, 1.0);
    EXPECT_EQ(r.report.method, "expression");
    EXPECT_NEAR(r.report.likelihood.mean, std::pow(6.616783126683455e-10, 1.0 / 20), 1e-12);
    EXPECT_NEAR(r.report.arithmetic_step_probability.mean, (3 * 0.001 + 17 * 0.976) / 20, 1e-12);
}

TEST(EvaluateExpression, Deterministic) {
    auto sc = sim::builtin_scenario("pc1");
    auto channels = sc.channels();
    Formula f = parse("◊_[5,10](a_y >= 0.5)", ParseContext{&channels, 25});
    auto run = [&] {
        Rng rng(7);
        return evaluate_expression(f, sc, sc.true_model(), 50, rng).report;
    };
    MetricReport a = run(), b = run();
    EXPECT_EQ(a.failures, b.failures);
    EXPECT_TRUE(a.likelihood.mean == b.likelihood.mean || (std::isnan(a.likelihood.mean) && std::isnan(b.likelihood.mean)));
}
