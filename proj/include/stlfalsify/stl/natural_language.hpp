#pragma once

#include <cstdio>
#include <string>

#include "stlfalsify/stl/channel.hpp"
#include "stlfalsify/stl/formula.hpp"
#include "stlfalsify/stl/text.hpp"

namespace stlf {

struct RenderOptions {
    double dt = 1.0;
    const ChannelList* channels = nullptr;  // supplies symbol descriptions
};

namespace detail {

inline std::string seconds(std::size_t step, double dt) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t=%.2fs", static_cast<double>(step) * dt);
    return buf;
}

inline std::string describe_atom(const Atom& a, const RenderOptions& opt) {
    if (auto sym = std::get_if<std::string>(&a.threshold)) {
        if (opt.channels) {
            if (auto ch = find_channel(*opt.channels, a.channel)) {
                const auto& spec = (*opt.channels)[*ch];
                if (spec.is_categorical()) {
                    const auto& kind = spec.categorical_kind();
                    auto idx = spec.symbol_index(*sym);
                    if (idx && !kind.descriptions.empty() && !kind.descriptions[*idx].empty())
                        return kind.descriptions[*idx];
                }
            }
        }
        return a.channel + " equals " + *sym;
    }
    std::string v = format_number(std::get<double>(a.threshold));
    switch (a.op) {
        case Comparator::Le: return a.channel + " is at most " + v;
        case Comparator::Ge: return a.channel + " is at least " + v;
        case Comparator::Eq: return a.channel + " equals " + v;
    }
    return {};
}

inline std::string render(const Formula& f, const RenderOptions& opt);

inline std::string render_operand(const Formula& child, Op parent, const RenderOptions& opt) {
    std::string s = render(child, opt);
    bool other_binary = (child.op() == Op::And || child.op() == Op::Or) && child.op() != parent;
    return other_binary ? "(" + s + ")" : s;
}

inline std::string render(const Formula& f, const RenderOptions& opt) {
    switch (f.op()) {
        case Op::Cmp: return describe_atom(f.atom(), opt);
        case Op::Not: return "it is not the case that " + render(f.child(0), opt);
        case Op::And:
            return render_operand(f.child(0), Op::And, opt) + " and " + render_operand(f.child(1), Op::And, opt);
        case Op::Or:
            return render_operand(f.child(0), Op::Or, opt) + " or " + render_operand(f.child(1), Op::Or, opt);
        case Op::Always:
        case Op::Eventually: {
            const auto& iv = f.interval();
            std::string head = f.op() == Op::Always ? "always between " : "at some time between ";
            return head + seconds(iv.lo, opt.dt) + " and " + seconds(iv.hi, opt.dt) + ", " + render(f.child(0), opt);
        }
    }
    return {};
}

}  // namespace detail

inline std::string render_natural_language(const Formula& f, const RenderOptions& opt = {}) {
    return detail::render(f, opt);
}

}  // namespace stlf
