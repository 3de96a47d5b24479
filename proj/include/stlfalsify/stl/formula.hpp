#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stlf {

enum class Op { And, Or, Not, Always, Eventually, Cmp };
enum class Level { Scalar, Series };
enum class Comparator { Le, Ge, Eq };

struct TimeInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;
    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Continuous threshold or categorical symbol name.
using Threshold = std::variant<double, std::string>;

struct Atom {
    std::string channel;
    Comparator op = Comparator::Le;
    Threshold threshold = 0.0;
    friend bool operator==(const Atom&, const Atom&) = default;
};

class Formula {
public:
    static Formula make_and(Formula lhs, Formula rhs) { return binary(Op::And, std::move(lhs), std::move(rhs)); }
    static Formula make_or(Formula lhs, Formula rhs) { return binary(Op::Or, std::move(lhs), std::move(rhs)); }

    static Formula make_not(Formula arg) {
        Level lvl = arg.level();
        std::size_t d = arg.depth() + 1;
        return Formula(Op::Not, lvl, d, {std::move(arg)}, {}, {});
    }

    static Formula always(TimeInterval iv, Formula arg) { return temporal(Op::Always, iv, std::move(arg)); }
    static Formula eventually(TimeInterval iv, Formula arg) { return temporal(Op::Eventually, iv, std::move(arg)); }

    static Formula cmp(Atom atom) {
        if (atom.channel.empty()) throw std::invalid_argument("comparison without channel");
        return Formula(Op::Cmp, Level::Series, 1, {}, {}, std::move(atom));
    }
    static Formula cmp(std::string channel, Comparator op, Threshold threshold) {
        return cmp(Atom{std::move(channel), op, std::move(threshold)});
    }

    Op op() const { return node_->op; }
    Level level() const { return node_->level; }
    std::size_t depth() const { return node_->depth; }
    std::size_t arity() const { return node_->children.size(); }
    const Formula& child(std::size_t i) const { return node_->children.at(i); }
    const std::vector<Formula>& children() const { return node_->children; }

    const TimeInterval& interval() const {
        if (!is_temporal()) throw std::logic_error("interval() on non-temporal node");
        return node_->interval;
    }
    const Atom& atom() const {
        if (op() != Op::Cmp) throw std::logic_error("atom() on non-comparison node");
        return node_->atom;
    }

    bool is_temporal() const { return op() == Op::Always || op() == Op::Eventually; }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& c : children()) n += c.size();
        return n;
    }

    /// Same op and children, new payloads.
    Formula with_children(std::vector<Formula> kids) const {
        switch (op()) {
            case Op::And: return make_and(std::move(kids.at(0)), std::move(kids.at(1)));
            case Op::Or: return make_or(std::move(kids.at(0)), std::move(kids.at(1)));
            case Op::Not: return make_not(std::move(kids.at(0)));
            case Op::Always:
            case Op::Eventually: return temporal(op(), interval(), std::move(kids.at(0)));
            case Op::Cmp: return *this;
        }
        return *this;
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        if (a.op() != b.op() || a.level() != b.level() || a.arity() != b.arity()) return false;
        if (a.is_temporal() && !(a.interval() == b.interval())) return false;
        if (a.op() == Op::Cmp && !(a.atom() == b.atom())) return false;
        for (std::size_t i = 0; i < a.arity(); ++i)
            if (!(a.child(i) == b.child(i))) return false;
        return true;
    }

private:
    struct Node {
        Op op;
        Level level;
        std::size_t depth;
        std::vector<Formula> children;
        TimeInterval interval;
        Atom atom;
    };

    Formula(Op op, Level level, std::size_t depth, std::vector<Formula> kids, TimeInterval iv, Atom atom)
        : node_(std::make_shared<const Node>(Node{op, level, depth, std::move(kids), iv, std::move(atom)})) {}

    static Formula binary(Op op, Formula lhs, Formula rhs) {
        if (lhs.level() != rhs.level()) throw std::invalid_argument("type mismatch: operands of different levels");
        Level lvl = lhs.level();
        std::size_t d = std::max(lhs.depth(), rhs.depth()) + 1;
        return Formula(op, lvl, d, {std::move(lhs), std::move(rhs)}, {}, {});
    }

    static Formula temporal(Op op, TimeInterval iv, Formula arg) {
        if (iv.lo > iv.hi) throw std::invalid_argument("interval lo > hi");
        if (arg.level() != Level::Series) throw std::invalid_argument("type mismatch: temporal operator needs a series argument");
        std::size_t d = arg.depth() + 1;
        return Formula(op, Level::Scalar, d, {std::move(arg)}, iv, {});
    }

    std::shared_ptr<const Node> node_;
};

}  // namespace stlf
