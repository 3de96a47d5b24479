#include <gtest/gtest.h>

#include <set>

#include "stlfalsify/constraints/constraints.hpp"
#include "stlfalsify/grammar/grammar.hpp"
#include "stlfalsify/samplers/model.hpp"
#include "stlfalsify/sim/scenario.hpp"
#include "stlfalsify/stl/evaluate.hpp"
#include "stlfalsify/stl/text.hpp"
#include "support.hpp"

using namespace stlf;

namespace {

constexpr Output T = Output::True;
constexpr Output F = Output::False;
constexpr Output A = Output::Arbitrary;

using Pair = std::vector<Output>;

// Collect every distinct result of a randomized rule.
template <class Fn>
std::set<Pair> outcomes(Fn fn, int draws = 200) {
    Rng rng(1);
    std::set<Pair> seen;
    for (int k = 0; k < draws; ++k) seen.insert(fn(rng));
    return seen;
}

ChannelList mixed_channels() {
    return {ChannelSpec::continuous("x", -5.0, 5.0), ChannelSpec::categorical("adv", {"none", "d_med", "a_maj"})};
}

}  // namespace

TEST(Table1, Negation) {
    Rng rng(0);
    EXPECT_EQ(subexpression_outputs(Op::Not, T, rng), Pair{F});
    EXPECT_EQ(subexpression_outputs(Op::Not, F, rng), Pair{T});
    EXPECT_EQ(subexpression_outputs(Op::Not, A, rng), Pair{A});
}

TEST(Table1, Conjunction) {
    Rng rng(0);
    EXPECT_EQ(subexpression_outputs(Op::And, T, rng), (Pair{T, T}));
    EXPECT_EQ(subexpression_outputs(Op::And, A, rng), (Pair{A, A}));
    auto seen = outcomes([](Rng& r) { return subexpression_outputs(Op::And, F, r); });
    EXPECT_EQ(seen, (std::set<Pair>{{F, A}, {A, F}}));
}

TEST(Table1, Disjunction) {
    Rng rng(0);
    EXPECT_EQ(subexpression_outputs(Op::Or, F, rng), (Pair{F, F}));
    EXPECT_EQ(subexpression_outputs(Op::Or, A, rng), (Pair{A, A}));
    auto seen = outcomes([](Rng& r) { return subexpression_outputs(Op::Or, T, r); });
    EXPECT_EQ(seen, (std::set<Pair>{{T, A}, {A, T}}));
}

TEST(Table1, ChoiceIsFair) {
    Rng rng(2);
    int left = 0;
    for (int k = 0; k < 10000; ++k)
        if (subexpression_outputs(Op::And, F, rng)[0] == F) ++left;
    EXPECT_NEAR(left / 10000.0, 0.5, 0.03);
}

TEST(Table1, RejectsNonConnectives) {
    Rng rng(0);
    EXPECT_THROW(subexpression_outputs(Op::Always, T, rng), std::invalid_argument);
    EXPECT_THROW(subexpression_outputs(Op::Cmp, T, rng), std::invalid_argument);
    EXPECT_THROW(subexpression_outputs(Op::And, TimeInterval{0, 1}, T, 3, rng), std::invalid_argument);
}

TEST(Table1, SeriesElementWise) {
    Rng rng(3);
    OutputSeries out{T, F, A, T, F};
    auto nots = subexpression_outputs(Op::Not, out, rng);
    ASSERT_EQ(nots.size(), 1u);
    EXPECT_EQ(nots[0], (OutputSeries{F, T, A, F, T}));

    // Per-step results allowed by the scalar rows.
    auto rows = [](Op op, Output o) -> std::set<Pair> {
        Output forced = op == Op::And ? T : F;
        if (o == A) return {{A, A}};
        if (o == forced) return {{o, o}};
        return {{o, A}, {A, o}};
    };
    for (int k = 0; k < 100; ++k) {
        for (auto op : {Op::And, Op::Or}) {
            auto kids = subexpression_outputs(op, out, rng);
            ASSERT_EQ(kids.size(), 2u);
            for (std::size_t i = 0; i < out.size(); ++i)
                EXPECT_EQ(rows(op, out[i]).count(Pair{kids[0][i], kids[1][i]}), 1u);
        }
    }
}

TEST(Table1, SeriesChoicesIndependentPerStep) {
    Rng rng(4);
    OutputSeries out{F, F};
    std::set<Pair> seen;
    for (int k = 0; k < 200; ++k) {
        auto ands = subexpression_outputs(Op::And, out, rng);
        seen.insert({ands[0][0], ands[0][1]});
    }
    EXPECT_EQ(seen.size(), 4u);
}

TEST(Table1, AlwaysTrueAndEventuallyFalseFillWindow) {
    Rng rng(5);
    OutputSeries window_t{A, T, T, T, A};
    OutputSeries window_f{A, F, F, F, A};
    EXPECT_EQ(subexpression_outputs(Op::Always, {1, 3}, T, 5, rng), window_t);
    EXPECT_EQ(subexpression_outputs(Op::Eventually, {1, 3}, F, 5, rng), window_f);
}

TEST(Table1, AlwaysFalseAndEventuallyTruePickOneStep) {
    for (auto [op, out] : {std::pair{Op::Always, F}, std::pair{Op::Eventually, T}}) {
        Rng rng(6);
        std::set<std::size_t> picked;
        for (int k = 0; k < 300; ++k) {
            auto s = subexpression_outputs(op, {1, 3}, out, 5, rng);
            std::size_t count = 0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] == A) continue;
                EXPECT_EQ(s[i], out);
                ++count;
                picked.insert(i);
            }
            EXPECT_EQ(count, 1u);
        }
        EXPECT_EQ(picked, (std::set<std::size_t>{1, 2, 3}));
    }
}

TEST(Table1, TemporalArbitrary) {
    Rng rng(7);
    for (auto op : {Op::Always, Op::Eventually})
        EXPECT_EQ(subexpression_outputs(op, {1, 3}, A, 5, rng), OutputSeries(5, A));
}

TEST(Table1, TemporalWindowChecks) {
    Rng rng(8);
    EXPECT_THROW(subexpression_outputs(Op::Always, {2, 5}, T, 5, rng), std::out_of_range);
    EXPECT_THROW(subexpression_outputs(Op::Always, {3, 2}, T, 5, rng), std::out_of_range);
}

TEST(SampleConstraints, AlwaysAtom) {
    Rng rng(9);
    auto leaves = sample_constraints(parse("□_[1,2](x <= 1)"), T, 4, rng);
    ASSERT_EQ(leaves.size(), 1u);
    EXPECT_EQ(leaves[0].atom, (Atom{"x", Comparator::Le, 1.0}));
    EXPECT_EQ(leaves[0].outputs, (OutputSeries{A, T, T, A}));
}

TEST(SampleConstraints, ConjunctionOfTemporals) {
    Rng rng(10);
    auto leaves = sample_constraints(parse("(□_[0,1](x >= 0) ∧ ◊_[2,2](¬(x = 3)))"), T, 3, rng);
    ASSERT_EQ(leaves.size(), 2u);
    EXPECT_EQ(leaves[0].outputs, (OutputSeries{T, T, A}));
    EXPECT_EQ(leaves[1].atom.op, Comparator::Eq);
    EXPECT_EQ(leaves[1].outputs, (OutputSeries{A, A, F}));
}

TEST(SampleConstraints, FalseTargetAndBareSeries) {
    Rng rng(11);
    // A bare series formula means "at every step".
    auto leaves = sample_constraints(parse("x <= 0"), F, 3, rng);
    ASSERT_EQ(leaves.size(), 1u);
    std::size_t fixed = 0;
    for (auto o : leaves[0].outputs)
        if (o == F) ++fixed;
    EXPECT_EQ(fixed, 1u);
    EXPECT_TRUE(sample_constraints(parse("□_[0,1](x <= 0)"), A, 3, rng).empty());
}

TEST(Compile, IntersectsBounds) {
    ChannelList ch = mixed_channels();
    std::vector<LeafConstraint> leaves{{{"x", Comparator::Ge, -5.0}, {T, A}}, {{"x", Comparator::Le, 2.0}, {T, T}}};
    auto cs = compile(leaves, ch, 2);
    ASSERT_TRUE(cs);
    EXPECT_EQ(cs->bounds(0).lo, (std::vector<double>{-5.0, -5.0}));
    EXPECT_EQ(cs->bounds(0).hi, (std::vector<double>{2.0, 2.0}));
}

TEST(Compile, ConflictIsInfeasible) {
    ChannelList ch = mixed_channels();
    std::vector<LeafConstraint> leaves{{{"x", Comparator::Ge, 1.0}, {T}}, {{"x", Comparator::Le, 0.0}, {T}}};
    EXPECT_FALSE(compile(leaves, ch, 1));
}

TEST(Compile, SymbolMask) {
    ChannelList ch = mixed_channels();
    std::vector<LeafConstraint> leaves{{{"adv", Comparator::Eq, std::string("a_maj")}, {T, F, A}}};
    auto cs = compile(leaves, ch, 3);
    ASSERT_TRUE(cs);
    EXPECT_EQ(cs->mask(1).allowed, (std::vector<std::uint64_t>{0b100, 0b011, 0b111}));

    std::vector<LeafConstraint> clash{{{"adv", Comparator::Eq, std::string("a_maj")}, {T}},
                                      {{"adv", Comparator::Eq, std::string("none")}, {T}}};
    EXPECT_FALSE(compile(clash, ch, 1));
}

TEST(Compile, StrictInequalitiesUseEpsilon) {
    ChannelList ch = mixed_channels();
    std::vector<LeafConstraint> leaves{{{"x", Comparator::Le, 1.0}, {F, A}}, {{"x", Comparator::Ge, -1.0}, {A, F}}};
    auto cs = compile(leaves, ch, 2);
    ASSERT_TRUE(cs);
    EXPECT_EQ(cs->bounds(0).lo[0], 1.0 + 1e-6);
    EXPECT_EQ(cs->bounds(0).hi[0], 5.0);
    EXPECT_EQ(cs->bounds(0).lo[1], -5.0);
    EXPECT_EQ(cs->bounds(0).hi[1], -1.0 - 1e-6);
}

TEST(Compile, EqualityFalse) {
    ChannelList ch = mixed_channels();
    // Interior point: excluded with probability one already.
    auto interior = compile({{{"x", Comparator::Eq, 0.0}, {F}}}, ch, 1);
    ASSERT_TRUE(interior);
    EXPECT_EQ(interior->bounds(0).lo[0], -5.0);
    EXPECT_EQ(interior->bounds(0).hi[0], 5.0);

    // Endpoint: nudged inward.
    auto endpoint = compile({{{"x", Comparator::Le, 1.0}, {T}}, {{"x", Comparator::Eq, 1.0}, {F}}}, ch, 1);
    ASSERT_TRUE(endpoint);
    EXPECT_EQ(endpoint->bounds(0).hi[0], 1.0 - 1e-6);

    // Degenerate [v, v]: nothing left.
    EXPECT_FALSE(compile({{{"x", Comparator::Eq, 1.0}, {T}}, {{"x", Comparator::Eq, 1.0}, {F}}}, ch, 1));
}

TEST(Compile, EqualityTruePinsValue) {
    ChannelList ch = mixed_channels();
    auto cs = compile({{{"x", Comparator::Eq, 0.25}, {A, T}}}, ch, 2);
    ASSERT_TRUE(cs);
    EXPECT_EQ(cs->bounds(0).lo[1], 0.25);
    EXPECT_EQ(cs->bounds(0).hi[1], 0.25);
}

TEST(Compile, HorizonMismatchThrows) {
    ChannelList ch = mixed_channels();
    EXPECT_THROW(compile({{{"x", Comparator::Le, 0.0}, {T}}}, ch, 2), std::invalid_argument);
}

TEST(Compile, SampleFeasibleGivesUp) {
    ChannelList ch = mixed_channels();
    Rng rng(12);
    Formula contradiction = parse("(□_[0,0](adv = a_maj) ∧ □_[0,0](adv = none))");
    EXPECT_FALSE(sample_feasible_constraints(contradiction, ch, 3, rng));
}

// Every sample drawn inside a compiled constraint set satisfies its formula.
TEST(Properties, Soundness) {
    std::vector<std::pair<ChannelList, DisturbanceModel>> cases;
    for (const char* id : {"lt1", "pc1"}) {
        auto sc = sim::builtin_scenario(id);
        cases.push_back({sc.channels(), sc.true_model()});
    }
    cases.push_back({test::scalar_channel(), test::uniform_model(test::scalar_channel())});
    for (const auto& [channels, model] : cases) {
        GrammarSpec g = GrammarSpec::standard(channels, 9);
        Rng rng(13);
        int checked = 0;
        for (int k = 0; k < 100; ++k) {
            Formula f = sample_expression(g, NodeType::Bool, 6, rng);
            for (int s = 0; s < 5; ++s) {
                auto cs = sample_feasible_constraints(f, channels, 10, rng);
                if (!cs) break;
                SignalTrace trace = sample_trace(model, 10, 0.2, &*cs, rng);
                ASSERT_TRUE(cs->satisfied_by(trace));
                ASSERT_TRUE(evaluate(f, trace)) << canonical_text(f);
                ++checked;
            }
        }
        EXPECT_GT(checked, 200);
    }
}

TEST(Properties, Deterministic) {
    auto sc = sim::builtin_scenario("lt1");
    GrammarSpec g = GrammarSpec::standard(sc.channels(), 19);
    auto run = [&] {
        Rng rng(14);
        std::vector<std::vector<std::uint64_t>> masks;
        for (int k = 0; k < 50; ++k) {
            Formula f = sample_expression(g, NodeType::Bool, 6, rng);
            if (auto cs = sample_feasible_constraints(f, sc.channels(), 20, rng)) masks.push_back(cs->mask(0).allowed);
        }
        return masks;
    };
    EXPECT_EQ(run(), run());
}
