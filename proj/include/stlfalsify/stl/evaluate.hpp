#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlfalsify/stl/formula.hpp"
#include "stlfalsify/stl/trace.hpp"

namespace stlf {

/// Throws if the formula is ill-typed over the channels, or an interval exceeds the horizon.
inline void check_formula(const Formula& f, const ChannelList& channels, std::optional<std::size_t> horizon = {}) {
    if (f.is_temporal() && horizon && f.interval().hi >= *horizon)
        throw std::out_of_range("interval [" + std::to_string(f.interval().lo) + "," +
                                std::to_string(f.interval().hi) + "] exceeds horizon " + std::to_string(*horizon));
    if (f.op() == Op::Cmp) {
        const Atom& a = f.atom();
        const auto& spec = channels.at(require_channel(channels, a.channel));
        if (spec.is_categorical()) {
            if (a.op != Comparator::Eq)
                throw std::invalid_argument("categorical channel " + a.channel + " supports only '='");
            auto sym = std::get_if<std::string>(&a.threshold);
            if (!sym) throw std::invalid_argument("type mismatch: numeric threshold on categorical channel " + a.channel);
            if (!spec.symbol_index(*sym))
                throw std::invalid_argument("unknown symbol '" + *sym + "' for channel " + a.channel);
        } else if (!std::holds_alternative<double>(a.threshold)) {
            throw std::invalid_argument("type mismatch: symbol threshold on continuous channel " + a.channel);
        }
    }
    for (const auto& c : f.children()) check_formula(c, channels, horizon);
}

namespace detail {

inline bool compare_at(const Atom& a, std::size_t ch, const SignalTrace& trace, std::size_t step) {
    const auto& spec = trace.channels()[ch];
    if (spec.is_categorical()) {
        auto sym = spec.symbol_index(std::get<std::string>(a.threshold));
        return trace.symbol(ch, step) == *sym;
    }
    double v = trace.real(ch, step);
    double thr = std::get<double>(a.threshold);
    switch (a.op) {
        case Comparator::Le: return v <= thr;
        case Comparator::Ge: return v >= thr;
        case Comparator::Eq: return v == thr;
    }
    return false;
}

inline std::vector<char> series(const Formula& f, const SignalTrace& trace) {
    const std::size_t m = trace.horizon();
    std::vector<char> out(m, 0);
    switch (f.op()) {
        case Op::Cmp: {
            std::size_t ch = trace.channel(f.atom().channel);
            for (std::size_t i = 0; i < m; ++i) out[i] = compare_at(f.atom(), ch, trace, i);
            return out;
        }
        case Op::Not: {
            auto a = series(f.child(0), trace);
            for (std::size_t i = 0; i < m; ++i) out[i] = !a[i];
            return out;
        }
        case Op::And:
        case Op::Or: {
            auto a = series(f.child(0), trace);
            auto b = series(f.child(1), trace);
            for (std::size_t i = 0; i < m; ++i) out[i] = f.op() == Op::And ? (a[i] && b[i]) : (a[i] || b[i]);
            return out;
        }
        default: throw std::invalid_argument("type mismatch: scalar node in series position");
    }
}

inline bool scalar(const Formula& f, const SignalTrace& trace) {
    switch (f.op()) {
        case Op::Always:
        case Op::Eventually: {
            auto s = series(f.child(0), trace);
            const auto& iv = f.interval();
            bool all = f.op() == Op::Always;
            for (std::size_t i = iv.lo; i <= iv.hi; ++i) {
                if (all && !s[i]) return false;
                if (!all && s[i]) return true;
            }
            return all;
        }
        case Op::Not: return !scalar(f.child(0), trace);
        case Op::And: return scalar(f.child(0), trace) && scalar(f.child(1), trace);
        case Op::Or: return scalar(f.child(0), trace) || scalar(f.child(1), trace);
        default: throw std::invalid_argument("type mismatch: series node in scalar position");
    }
}

}  // namespace detail

/// Per-step truth of a series formula.
inline std::vector<char> evaluate_series(const Formula& f, const SignalTrace& trace) {
    if (f.level() != Level::Series) throw std::invalid_argument("type mismatch: expected a series formula");
    check_formula(f, trace.channels(), trace.horizon());
    return detail::series(f, trace);
}

inline bool evaluate(const Formula& f, const SignalTrace& trace) {
    if (f.level() != Level::Scalar) throw std::invalid_argument("type mismatch: expected a scalar formula");
    check_formula(f, trace.channels(), trace.horizon());
    return detail::scalar(f, trace);
}

/// A bare series formula used at the root means "at every step".
inline Formula as_scalar(const Formula& f, std::size_t horizon) {
    if (f.level() == Level::Scalar) return f;
    if (horizon == 0) throw std::invalid_argument("empty horizon");
    return Formula::always({0, horizon - 1}, f);
}

}  // namespace stlf
