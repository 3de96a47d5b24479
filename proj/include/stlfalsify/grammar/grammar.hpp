#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stlfalsify/random.hpp"
#include "stlfalsify/stl/channel.hpp"
#include "stlfalsify/stl/formula.hpp"

namespace stlf {

inline constexpr std::size_t kMaxDepth = 10;

enum class NodeType { Bool, Series, Time, Value };

enum class Rule { BoolAnd, BoolOr, BoolNot, Always, Eventually, SeriesAnd, SeriesOr, SeriesNot, Compare };

struct Production {
    Rule rule;
    std::size_t channel = 0;  // Compare only
    Comparator op = Comparator::Eq;
};

struct GrammarSpec {
    std::vector<Production> bool_rules;
    std::vector<Production> series_rules;
    ChannelList channels;
    std::size_t t_max = 0;  // last step index

    /// The full grammar: connectives at both levels, both temporal operators,
    /// every comparator on continuous channels and '=' on categorical ones.
    static GrammarSpec standard(ChannelList channels, std::size_t t_max) {
        GrammarSpec g;
        g.bool_rules = {{Rule::BoolAnd}, {Rule::BoolOr}, {Rule::BoolNot}, {Rule::Always}, {Rule::Eventually}};
        g.series_rules = {{Rule::SeriesAnd}, {Rule::SeriesOr}, {Rule::SeriesNot}};
        for (std::size_t j = 0; j < channels.size(); ++j) {
            if (channels[j].is_categorical()) {
                g.series_rules.push_back({Rule::Compare, j, Comparator::Eq});
            } else {
                for (auto op : {Comparator::Le, Comparator::Ge, Comparator::Eq})
                    g.series_rules.push_back({Rule::Compare, j, op});
            }
        }
        g.channels = std::move(channels);
        g.t_max = t_max;
        g.validate();
        return g;
    }

    void validate() const {
        for (const auto& c : channels) c.validate();
        for (const auto& p : bool_rules) {
            if (p.rule >= Rule::SeriesAnd) throw std::invalid_argument("grammar: series rule listed under Bool");
            if ((p.rule == Rule::Always || p.rule == Rule::Eventually) && series_rules.empty())
                throw std::invalid_argument("grammar: temporal rule without series rules");
        }
        for (const auto& p : series_rules) {
            if (p.rule < Rule::SeriesAnd) throw std::invalid_argument("grammar: Bool rule listed under Series");
            if (p.rule == Rule::Compare) {
                if (p.channel >= channels.size()) throw std::invalid_argument("grammar: rule references unknown channel");
                if (channels[p.channel].is_categorical() && p.op != Comparator::Eq)
                    throw std::invalid_argument("grammar: categorical channels support only '='");
            }
        }
        if (min_depth(NodeType::Bool) == kUnreachable && !bool_rules.empty())
            throw std::invalid_argument("grammar: Bool has no terminal-reaching rule");
        if (min_depth(NodeType::Series) == kUnreachable && !series_rules.empty())
            throw std::invalid_argument("grammar: Series has no terminal-reaching rule");
    }

    static constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max() / 4;

    /// Smallest tree depth derivable from a nonterminal.
    std::size_t min_depth(NodeType t) const {
        if (t == NodeType::Time || t == NodeType::Value) return 0;
        std::size_t series = kUnreachable;
        for (const auto& p : series_rules)
            if (p.rule == Rule::Compare) series = 1;
        if (t == NodeType::Series) return series;
        bool temporal = false;
        for (const auto& p : bool_rules)
            if (p.rule == Rule::Always || p.rule == Rule::Eventually) temporal = true;
        return temporal && series != kUnreachable ? series + 1 : kUnreachable;
    }

    std::size_t min_depth(const Production& p) const {
        switch (p.rule) {
            case Rule::Compare: return 1;
            case Rule::Always:
            case Rule::Eventually:
            case Rule::SeriesAnd:
            case Rule::SeriesOr:
            case Rule::SeriesNot: return 1 + min_depth(NodeType::Series);
            default: return 1 + min_depth(NodeType::Bool);
        }
    }
};

/// Path of child indices from the root. Temporal nodes expose
/// (0: interval lo, 1: interval hi, 2: argument); comparisons expose (0: threshold).
struct NodeLocus {
    std::vector<std::size_t> path;
    NodeType type = NodeType::Bool;
    std::string channel;  // Value loci only

    std::size_t depth() const { return path.size(); }
    bool compatible(const NodeLocus& o) const {
        return type == o.type && (type != NodeType::Value || channel == o.channel);
    }
};

namespace detail {

inline void collect_loci(const Formula& f, std::vector<std::size_t>& path, std::vector<NodeLocus>& out) {
    out.push_back({path, f.level() == Level::Scalar ? NodeType::Bool : NodeType::Series, {}});
    if (f.op() == Op::Cmp) {
        path.push_back(0);
        out.push_back({path, NodeType::Value, f.atom().channel});
        path.pop_back();
        return;
    }
    if (f.is_temporal()) {
        for (std::size_t k : {0u, 1u}) {
            path.push_back(k);
            out.push_back({path, NodeType::Time, {}});
            path.pop_back();
        }
        path.push_back(2);
        collect_loci(f.child(0), path, out);
        path.pop_back();
        return;
    }
    for (std::size_t i = 0; i < f.arity(); ++i) {
        path.push_back(i);
        collect_loci(f.child(i), path, out);
        path.pop_back();
    }
}

}  // namespace detail

inline std::vector<NodeLocus> enumerate_loci(const Formula& f) {
    std::vector<NodeLocus> out;
    std::vector<std::size_t> path;
    detail::collect_loci(f, path, out);
    return out;
}

/// A replacement for a locus: subtree, time index, or threshold.
using Fragment = std::variant<Formula, std::size_t, Threshold>;

inline Fragment fragment_at(const Formula& f, const std::vector<std::size_t>& path, std::size_t from = 0) {
    if (from == path.size()) return f;
    std::size_t k = path[from];
    if (f.op() == Op::Cmp) return f.atom().threshold;
    if (f.is_temporal()) {
        if (k == 0) return f.interval().lo;
        if (k == 1) return f.interval().hi;
        return fragment_at(f.child(0), path, from + 1);
    }
    return fragment_at(f.child(k), path, from + 1);
}

inline Formula replace_at(const Formula& f, const std::vector<std::size_t>& path, const Fragment& frag,
                          std::size_t from = 0) {
    if (from == path.size()) return std::get<Formula>(frag);
    std::size_t k = path[from];
    if (f.op() == Op::Cmp) {
        Atom a = f.atom();
        a.threshold = std::get<Threshold>(frag);
        return Formula::cmp(std::move(a));
    }
    if (f.is_temporal()) {
        TimeInterval iv = f.interval();
        if (k < 2) {
            (k == 0 ? iv.lo : iv.hi) = std::get<std::size_t>(frag);
            if (iv.lo > iv.hi) std::swap(iv.lo, iv.hi);
            return f.op() == Op::Always ? Formula::always(iv, f.child(0)) : Formula::eventually(iv, f.child(0));
        }
        Formula arg = replace_at(f.child(0), path, frag, from + 1);
        return f.op() == Op::Always ? Formula::always(iv, std::move(arg)) : Formula::eventually(iv, std::move(arg));
    }
    std::vector<Formula> kids = f.children();
    kids.at(k) = replace_at(kids[k], path, frag, from + 1);
    return f.with_children(std::move(kids));
}

template <class URBG>
std::size_t sample_time(const GrammarSpec& g, URBG& rng) {
    return std::uniform_int_distribution<std::size_t>(0, g.t_max)(rng);
}

template <class URBG>
Threshold sample_threshold(const ChannelSpec& spec, URBG& rng) {
    if (spec.is_categorical()) {
        const auto& syms = spec.categorical_kind().symbols;
        return syms[uniform_index(syms.size(), rng)];
    }
    const auto& c = spec.continuous_kind();
    return std::uniform_real_distribution<double>(c.x_min, c.x_max)(rng);
}

template <class URBG>
Formula sample_expression(const GrammarSpec& g, NodeType start, std::size_t max_depth, URBG& rng) {
    if (start != NodeType::Bool && start != NodeType::Series)
        throw std::invalid_argument("sample_expression: start must be Bool or Series");
    const auto& rules = start == NodeType::Bool ? g.bool_rules : g.series_rules;
    std::vector<const Production*> usable;
    for (const auto& p : rules)
        if (g.min_depth(p) <= max_depth) usable.push_back(&p);
    if (usable.empty())
        throw std::invalid_argument("grammar: no terminal-reaching rule within depth " + std::to_string(max_depth));
    const Production& p = *usable[uniform_index(usable.size(), rng)];
    const std::size_t sub = max_depth - 1;
    switch (p.rule) {
        case Rule::BoolAnd:
        case Rule::BoolOr: {
            Formula a = sample_expression(g, NodeType::Bool, sub, rng);
            Formula b = sample_expression(g, NodeType::Bool, sub, rng);
            return p.rule == Rule::BoolAnd ? Formula::make_and(a, b) : Formula::make_or(a, b);
        }
        case Rule::BoolNot: return Formula::make_not(sample_expression(g, NodeType::Bool, sub, rng));
        case Rule::Always:
        case Rule::Eventually: {
            std::size_t t1 = sample_time(g, rng);
            std::size_t t2 = sample_time(g, rng);
            TimeInterval iv{std::min(t1, t2), std::max(t1, t2)};
            Formula arg = sample_expression(g, NodeType::Series, sub, rng);
            return p.rule == Rule::Always ? Formula::always(iv, arg) : Formula::eventually(iv, arg);
        }
        case Rule::SeriesAnd:
        case Rule::SeriesOr: {
            Formula a = sample_expression(g, NodeType::Series, sub, rng);
            Formula b = sample_expression(g, NodeType::Series, sub, rng);
            return p.rule == Rule::SeriesAnd ? Formula::make_and(a, b) : Formula::make_or(a, b);
        }
        case Rule::SeriesNot: return Formula::make_not(sample_expression(g, NodeType::Series, sub, rng));
        case Rule::Compare: {
            const auto& spec = g.channels[p.channel];
            return Formula::cmp(spec.id, p.op, sample_threshold(spec, rng));
        }
    }
    throw std::logic_error("unreachable rule");
}

template <class URBG>
Fragment sample_fragment(const GrammarSpec& g, const NodeLocus& at, std::size_t max_depth, URBG& rng) {
    switch (at.type) {
        case NodeType::Time: return sample_time(g, rng);
        case NodeType::Value: return sample_threshold(g.channels.at(require_channel(g.channels, at.channel)), rng);
        default: return sample_expression(g, at.type, max_depth - at.depth(), rng);
    }
}

/// Replace one uniformly chosen node with a fresh subtree of the same type.
template <class URBG>
Formula mutate(const Formula& f, const GrammarSpec& g, URBG& rng, std::size_t max_depth = kMaxDepth) {
    auto loci = enumerate_loci(f);
    for (int attempt = 0; attempt < 20; ++attempt) {
        const NodeLocus& at = loci[uniform_index(loci.size(), rng)];
        bool structural = at.type == NodeType::Bool || at.type == NodeType::Series;
        if (structural && (at.depth() >= max_depth || g.min_depth(at.type) > max_depth - at.depth())) continue;
        Formula out = replace_at(f, at.path, sample_fragment(g, at, max_depth, rng));
        if (out.depth() <= max_depth) return out;
    }
    return f;
}

/// A random subtree of `a` replaces a random same-typed node of `b` (never b's root).
template <class URBG>
Formula crossover(const Formula& a, const Formula& b, URBG& rng, std::size_t max_depth = kMaxDepth) {
    auto donors = enumerate_loci(a);
    auto recipients = enumerate_loci(b);
    recipients.erase(recipients.begin());
    bool any = false;
    for (const auto& d : donors)
        for (const auto& r : recipients)
            if (d.compatible(r)) any = true;
    if (!any) return b;
    for (int attempt = 0; attempt < 20; ++attempt) {
        const NodeLocus& d = donors[uniform_index(donors.size(), rng)];
        std::vector<const NodeLocus*> targets;
        for (const auto& r : recipients)
            if (d.compatible(r)) targets.push_back(&r);
        if (targets.empty()) continue;
        const NodeLocus& r = *targets[uniform_index(targets.size(), rng)];
        Formula out = replace_at(b, r.path, fragment_at(a, d.path));
        if (out.depth() <= max_depth) return out;
    }
    return b;
}

/// Throws unless `f` obeys the grammar's typing, ranges, and depth bound.
inline void check_grammar_invariants(const Formula& f, const GrammarSpec& g, std::size_t max_depth = kMaxDepth) {
    if (f.depth() > max_depth) throw std::domain_error("formula deeper than " + std::to_string(max_depth));
    auto walk = [&](auto&& self, const Formula& n) -> void {
        switch (n.op()) {
            case Op::And:
            case Op::Or:
                if (n.child(0).level() != n.level() || n.child(1).level() != n.level())
                    throw std::domain_error("binary operator with mismatched operand levels");
                break;
            case Op::Not:
                if (n.child(0).level() != n.level()) throw std::domain_error("negation changes level");
                break;
            case Op::Always:
            case Op::Eventually:
                if (n.level() != Level::Scalar || n.child(0).level() != Level::Series)
                    throw std::domain_error("temporal operator typing");
                if (n.interval().lo > n.interval().hi || n.interval().hi > g.t_max)
                    throw std::domain_error("interval outside 0:T_max");
                break;
            case Op::Cmp: {
                if (n.level() != Level::Series) throw std::domain_error("comparison must be series-typed");
                const auto& a = n.atom();
                const auto& spec = g.channels.at(require_channel(g.channels, a.channel));
                if (spec.is_categorical()) {
                    auto s = std::get_if<std::string>(&a.threshold);
                    if (a.op != Comparator::Eq || !s || !spec.symbol_index(*s))
                        throw std::domain_error("bad categorical comparison");
                } else {
                    auto v = std::get_if<double>(&a.threshold);
                    const auto& c = spec.continuous_kind();
                    if (!v || *v < c.x_min || *v > c.x_max) throw std::domain_error("threshold outside channel range");
                }
                break;
            }
        }
        for (const auto& c : n.children()) self(self, c);
    };
    walk(walk, f);
}

}  // namespace stlf
