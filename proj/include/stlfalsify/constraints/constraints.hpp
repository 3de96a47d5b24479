#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stlfalsify/random.hpp"
#include "stlfalsify/stl/evaluate.hpp"
#include "stlfalsify/stl/formula.hpp"
#include "stlfalsify/stl/trace.hpp"

namespace stlf {

enum class Output : char { True, False, Arbitrary };
using OutputSeries = std::vector<Output>;

inline constexpr double kStrictEpsilon = 1e-6;
inline constexpr int kConstraintAttempts = 10;

inline Output negate(Output o) {
    if (o == Output::True) return Output::False;
    if (o == Output::False) return Output::True;
    return Output::Arbitrary;
}

/// Child outputs of a scalar- or series-level connective for one step.
template <class URBG>
std::vector<Output> subexpression_outputs(Op op, Output out, URBG& rng) {
    if (op == Op::Not) return {negate(out)};
    if (op != Op::And && op != Op::Or) throw std::invalid_argument("subexpression_outputs: not a connective");
    if (out == Output::Arbitrary) return {Output::Arbitrary, Output::Arbitrary};
    bool conj = op == Op::And;
    Output forced = conj ? Output::True : Output::False;
    if (out == forced) return {out, out};
    // One side carries the value, the other is free.
    bool left = uniform_index(2, rng) == 0;
    return left ? std::vector<Output>{out, Output::Arbitrary} : std::vector<Output>{Output::Arbitrary, out};
}

/// Element-wise rule for series-level connectives.
template <class URBG>
std::vector<OutputSeries> subexpression_outputs(Op op, const OutputSeries& out, URBG& rng) {
    std::size_t n = op == Op::Not ? 1 : 2;
    std::vector<OutputSeries> kids(n, OutputSeries(out.size(), Output::Arbitrary));
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == Output::Arbitrary) continue;
        auto step = subexpression_outputs(op, out[i], rng);
        for (std::size_t k = 0; k < n; ++k) kids[k][i] = step[k];
    }
    return kids;
}

/// Argument outputs of a temporal operator over a horizon of m steps.
template <class URBG>
OutputSeries subexpression_outputs(Op op, TimeInterval iv, Output out, std::size_t m, URBG& rng) {
    if (op != Op::Always && op != Op::Eventually) throw std::invalid_argument("subexpression_outputs: not temporal");
    if (iv.lo > iv.hi || iv.hi >= m) throw std::out_of_range("interval outside horizon");
    OutputSeries s(m, Output::Arbitrary);
    if (out == Output::Arbitrary) return s;
    bool every = (op == Op::Always) == (out == Output::True);
    if (every) {
        for (std::size_t i = iv.lo; i <= iv.hi; ++i) s[i] = out;
    } else {
        std::size_t i = std::uniform_int_distribution<std::size_t>(iv.lo, iv.hi)(rng);
        s[i] = out;
    }
    return s;
}

struct LeafConstraint {
    Atom atom;
    OutputSeries outputs;
};

namespace detail {

inline bool all_arbitrary(const OutputSeries& s) {
    for (auto o : s)
        if (o != Output::Arbitrary) return false;
    return true;
}

template <class URBG>
void constrain_series(const Formula& f, const OutputSeries& out, URBG& rng, std::vector<LeafConstraint>& acc) {
    if (all_arbitrary(out)) return;
    if (f.op() == Op::Cmp) {
        acc.push_back({f.atom(), out});
        return;
    }
    auto kids = subexpression_outputs(f.op(), out, rng);
    for (std::size_t k = 0; k < kids.size(); ++k) constrain_series(f.child(k), kids[k], rng, acc);
}

template <class URBG>
void constrain_scalar(const Formula& f, Output out, std::size_t m, URBG& rng, std::vector<LeafConstraint>& acc) {
    if (out == Output::Arbitrary) return;
    if (f.is_temporal()) {
        constrain_series(f.child(0), subexpression_outputs(f.op(), f.interval(), out, m, rng), rng, acc);
        return;
    }
    auto kids = subexpression_outputs(f.op(), out, rng);
    for (std::size_t k = 0; k < kids.size(); ++k) constrain_scalar(f.child(k), kids[k], m, rng, acc);
}

}  // namespace detail

/// Leaf requirements that force `ex` to evaluate to `out` on a horizon of m steps.
template <class URBG>
std::vector<LeafConstraint> sample_constraints(const Formula& ex, Output out, std::size_t m, URBG& rng) {
    std::vector<LeafConstraint> acc;
    detail::constrain_scalar(as_scalar(ex, m), out, m, rng, acc);
    return acc;
}

struct ContinuousBounds {
    std::vector<double> lo;
    std::vector<double> hi;
};

struct SymbolMask {
    std::vector<std::uint64_t> allowed;  // bit s set when symbol s is allowed
};

class ConstraintSet {
public:
    using Entry = std::variant<ContinuousBounds, SymbolMask>;

    ConstraintSet(ChannelList channels, std::size_t horizon) : channels_(std::move(channels)), horizon_(horizon) {
        for (const auto& spec : channels_) {
            if (spec.is_categorical()) {
                std::size_t n = spec.symbol_count();
                std::uint64_t full = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
                entries_.emplace_back(SymbolMask{std::vector<std::uint64_t>(horizon, full)});
            } else {
                auto [l, u] = spec.default_bounds();
                entries_.emplace_back(ContinuousBounds{std::vector<double>(horizon, l), std::vector<double>(horizon, u)});
            }
        }
    }

    const ChannelList& channels() const { return channels_; }
    std::size_t horizon() const { return horizon_; }
    const Entry& entry(std::size_t ch) const { return entries_.at(ch); }
    Entry& entry(std::size_t ch) { return entries_.at(ch); }

    const ContinuousBounds& bounds(std::size_t ch) const { return std::get<ContinuousBounds>(entries_.at(ch)); }
    const SymbolMask& mask(std::size_t ch) const { return std::get<SymbolMask>(entries_.at(ch)); }

    bool feasible() const {
        for (const auto& e : entries_) {
            if (auto b = std::get_if<ContinuousBounds>(&e)) {
                for (std::size_t i = 0; i < horizon_; ++i)
                    if (!(b->lo[i] <= b->hi[i])) return false;
            } else {
                for (auto m : std::get<SymbolMask>(e).allowed)
                    if (m == 0) return false;
            }
        }
        return true;
    }

    bool satisfied_by(const SignalTrace& trace) const {
        if (trace.horizon() < horizon_) return false;
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            std::size_t ch = trace.channel(channels_[j].id);
            for (std::size_t i = 0; i < horizon_; ++i) {
                if (auto b = std::get_if<ContinuousBounds>(&entries_[j])) {
                    double v = trace.real(ch, i);
                    if (v < b->lo[i] || v > b->hi[i]) return false;
                } else if (!(mask(j).allowed[i] >> trace.symbol(ch, i) & 1U)) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    ChannelList channels_;
    std::size_t horizon_;
    std::vector<Entry> entries_;
};

/// Intersect leaf requirements into per-step boxes and symbol sets; nullopt when infeasible.
inline std::optional<ConstraintSet> compile(const std::vector<LeafConstraint>& leaves, const ChannelList& channels,
                                            std::size_t m) {
    ConstraintSet cs(channels, m);
    // Excluded points from continuous (= v, False), applied after all bounds are known.
    std::vector<std::vector<std::pair<std::size_t, double>>> excluded(channels.size());
    for (const auto& leaf : leaves) {
        if (leaf.outputs.size() != m) throw std::invalid_argument("leaf outputs do not match horizon");
        std::size_t ch = require_channel(channels, leaf.atom.channel);
        const auto& spec = channels[ch];
        if (spec.is_categorical()) {
            auto sym = spec.symbol_index(std::get<std::string>(leaf.atom.threshold));
            if (!sym) throw std::invalid_argument("unknown symbol in constraint");
            auto& mask = std::get<SymbolMask>(cs.entry(ch)).allowed;
            std::uint64_t bit = std::uint64_t{1} << *sym;
            for (std::size_t i = 0; i < m; ++i) {
                if (leaf.outputs[i] == Output::True) mask[i] &= bit;
                else if (leaf.outputs[i] == Output::False) mask[i] &= ~bit;
            }
            continue;
        }
        double v = std::get<double>(leaf.atom.threshold);
        auto& b = std::get<ContinuousBounds>(cs.entry(ch));
        for (std::size_t i = 0; i < m; ++i) {
            Output o = leaf.outputs[i];
            if (o == Output::Arbitrary) continue;
            bool t = o == Output::True;
            switch (leaf.atom.op) {
                case Comparator::Le:
                    if (t) b.hi[i] = std::min(b.hi[i], v);
                    else b.lo[i] = std::max(b.lo[i], v + kStrictEpsilon);
                    break;
                case Comparator::Ge:
                    if (t) b.lo[i] = std::max(b.lo[i], v);
                    else b.hi[i] = std::min(b.hi[i], v - kStrictEpsilon);
                    break;
                case Comparator::Eq:
                    if (t) {
                        b.lo[i] = std::max(b.lo[i], v);
                        b.hi[i] = std::min(b.hi[i], v);
                    } else {
                        excluded[ch].push_back({i, v});
                    }
                    break;
            }
        }
    }
    for (std::size_t ch = 0; ch < channels.size(); ++ch) {
        if (excluded[ch].empty()) continue;
        auto& b = std::get<ContinuousBounds>(cs.entry(ch));
        for (auto [i, v] : excluded[ch]) {
            // Only a closed endpoint can be hit with positive probability.
            if (b.lo[i] == v && b.hi[i] == v) return std::nullopt;
            if (b.lo[i] == v) b.lo[i] = v + kStrictEpsilon;
            if (b.hi[i] == v) b.hi[i] = v - kStrictEpsilon;
        }
    }
    if (!cs.feasible()) return std::nullopt;
    return cs;
}

/// Sample leaf requirements for (φ, True) until they compile, at most `attempts` times.
template <class URBG>
std::optional<ConstraintSet> sample_feasible_constraints(const Formula& f, const ChannelList& channels, std::size_t m,
                                                         URBG& rng, int attempts = kConstraintAttempts) {
    for (int k = 0; k < attempts; ++k) {
        auto leaves = sample_constraints(f, Output::True, m, rng);
        if (auto cs = compile(leaves, channels, m)) return cs;
    }
    return std::nullopt;
}

}  // namespace stlf
