#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stlfalsify/stl/channel.hpp"
#include "stlfalsify/stl/formula.hpp"
#include "stlfalsify/stl/number.hpp"

namespace stlf {

inline const char* comparator_text(Comparator op) {
    switch (op) {
        case Comparator::Le: return "<=";
        case Comparator::Ge: return ">=";
        case Comparator::Eq: return "=";
    }
    return "?";
}

inline std::string threshold_text(const Threshold& t) {
    if (auto d = std::get_if<double>(&t)) return format_number(*d);
    return std::get<std::string>(t);
}

/// Fully parenthesized text; see docs/canonical_syntax.md.
inline std::string canonical_text(const Formula& f) {
    switch (f.op()) {
        case Op::Cmp:
            return f.atom().channel + " " + comparator_text(f.atom().op) + " " + threshold_text(f.atom().threshold);
        case Op::Not: return "¬(" + canonical_text(f.child(0)) + ")";
        case Op::And: return "(" + canonical_text(f.child(0)) + " ∧ " + canonical_text(f.child(1)) + ")";
        case Op::Or: return "(" + canonical_text(f.child(0)) + " ∨ " + canonical_text(f.child(1)) + ")";
        case Op::Always:
        case Op::Eventually: {
            const auto& iv = f.interval();
            return std::string(f.op() == Op::Always ? "□" : "◊") + "_[" + std::to_string(iv.lo) + "," +
                   std::to_string(iv.hi) + "](" + canonical_text(f.child(0)) + ")";
        }
    }
    return {};
}

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + msg), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

struct ParseContext {
    const ChannelList* channels = nullptr;  // resolves bare symbols and aliases
    std::optional<std::size_t> horizon;     // default interval [0, horizon-1]
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const ParseContext& ctx) : s_(text), ctx_(ctx) {}

    Formula parse() {
        Formula f = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
    [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const { throw ParseError(at, msg); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    // Keyword match that does not split an identifier.
    bool eat_word(std::string_view w) {
        skip_ws();
        if (s_.substr(pos_, w.size()) != w) return false;
        std::size_t end = pos_ + w.size();
        if (end < s_.size() && is_ident_char(s_[end])) return false;
        pos_ = end;
        return true;
    }

    static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void expect(std::string_view tok) {
        if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
    }

    Formula combine(Op op, Formula lhs, Formula rhs, std::size_t at) {
        try {
            return op == Op::And ? Formula::make_and(std::move(lhs), std::move(rhs))
                                 : Formula::make_or(std::move(lhs), std::move(rhs));
        } catch (const std::invalid_argument& e) {
            fail_at(at, e.what());
        }
    }

    Formula expr() {
        Formula lhs = conj();
        for (;;) {
            std::size_t at = (skip_ws(), pos_);
            if (eat("∨") || eat("||") || eat("|") || eat_word("or")) {
                lhs = combine(Op::Or, std::move(lhs), conj(), at);
            } else {
                return lhs;
            }
        }
    }

    Formula conj() {
        Formula lhs = unary();
        for (;;) {
            std::size_t at = (skip_ws(), pos_);
            if (eat("∧") || eat("&&") || eat("&") || eat_word("and")) {
                lhs = combine(Op::And, std::move(lhs), unary(), at);
            } else {
                return lhs;
            }
        }
    }

    std::optional<Op> temporal_keyword() {
        skip_ws();
        std::size_t save = pos_;
        if (eat("□")) return Op::Always;
        if (eat("◊")) return Op::Eventually;
        for (auto [word, op] : {std::pair{"always", Op::Always}, std::pair{"eventually", Op::Eventually},
                                std::pair{"G", Op::Always}, std::pair{"F", Op::Eventually}}) {
            std::string_view w = word;
            if (s_.substr(pos_, w.size()) != w) continue;
            std::size_t end = pos_ + w.size();
            // Keyword only when followed by an interval or an opening parenthesis.
            std::size_t k = end;
            if (k < s_.size() && s_[k] == '_') ++k;
            while (k < s_.size() && std::isspace(static_cast<unsigned char>(s_[k]))) ++k;
            if (k < s_.size() && (s_[k] == '[' || s_[k] == '(') && (end == s_.size() || !is_ident_char(s_[end]) || s_[end] == '_')) {
                pos_ = end;
                return op;
            }
        }
        pos_ = save;
        return std::nullopt;
    }

    std::size_t step_index() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a step index");
        return std::stoul(std::string(s_.substr(start, pos_ - start)));
    }

    Formula unary() {
        skip_ws();
        std::size_t at = pos_;
        if (eat("¬") || eat("!") || eat("~") || eat_word("not")) {
            Formula arg = unary();
            return Formula::make_not(std::move(arg));
        }
        if (auto op = temporal_keyword()) {
            TimeInterval iv;
            eat("_");
            std::size_t iv_at = (skip_ws(), pos_);
            if (eat("[")) {
                iv.lo = step_index();
                expect(",");
                iv.hi = step_index();
                expect("]");
                if (iv.lo > iv.hi) fail_at(iv_at, "interval lo > hi");
            } else if (ctx_.horizon && *ctx_.horizon > 0) {
                iv = {0, *ctx_.horizon - 1};
            } else {
                fail("expected an interval '[lo,hi]'");
            }
            std::size_t arg_at = (skip_ws(), pos_);
            Formula arg = unary();
            if (arg.level() != Level::Series) fail_at(arg_at, "type mismatch: temporal operator needs a series argument");
            return *op == Op::Always ? Formula::always(iv, std::move(arg)) : Formula::eventually(iv, std::move(arg));
        }
        if (eat("(")) {
            Formula f = expr();
            expect(")");
            return f;
        }
        if (pos_ >= s_.size()) fail("unexpected end of input");
        (void)at;
        return atom();
    }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos_;
        if (eat("∅")) return "∅";
        if (pos_ < s_.size() && is_ident_start(s_[pos_])) {
            while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
            return std::string(s_.substr(start, pos_ - start));
        }
        fail("expected an identifier");
    }

    std::optional<Comparator> comparator() {
        if (eat("<=") || eat("≤")) return Comparator::Le;
        if (eat(">=") || eat("≥")) return Comparator::Ge;
        if (eat("==") || eat("=")) return Comparator::Eq;
        return std::nullopt;
    }

    Threshold value(const ChannelSpec* spec) {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' ||
                                 s_[pos_] == '+' || s_[pos_] == '.')) {
            std::size_t k = pos_ + 1;
            while (k < s_.size()) {
                char c = s_[k];
                bool exp_sign = (c == '-' || c == '+') && (s_[k - 1] == 'e' || s_[k - 1] == 'E');
                if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign)) break;
                ++k;
            }
            auto v = parse_number(s_.substr(start, k - start));
            if (!v) fail("malformed number");
            pos_ = k;
            if (spec && spec->is_categorical()) fail_at(start, "type mismatch: numeric threshold on categorical channel");
            return *v;
        }
        std::string sym = identifier();
        if (spec) {
            if (!spec->is_categorical()) fail_at(start, "type mismatch: symbol on continuous channel");
            auto idx = spec->symbol_index(sym);
            if (!idx) fail_at(start, "unknown symbol '" + sym + "'");
            return spec->categorical_kind().symbols[*idx];
        }
        return sym;
    }

    Formula atom() {
        skip_ws();
        std::size_t start = pos_;
        std::string name = identifier();
        const ChannelSpec* spec = nullptr;
        if (ctx_.channels) {
            if (auto i = find_channel(*ctx_.channels, name)) spec = &(*ctx_.channels)[*i];
        }
        auto op = comparator();
        if (!op) {
            // Bare symbol: resolve against the unique categorical channel that knows it.
            if (!ctx_.channels) fail_at(start, "bare symbol '" + name + "' needs channel context");
            const ChannelSpec* owner = nullptr;
            for (const auto& c : *ctx_.channels) {
                if (c.is_categorical() && c.symbol_index(name)) {
                    if (owner) fail_at(start, "ambiguous symbol '" + name + "'");
                    owner = &c;
                }
            }
            if (!owner) fail_at(start, "unknown symbol '" + name + "'");
            return Formula::cmp(owner->id, Comparator::Eq, owner->categorical_kind().symbols[*owner->symbol_index(name)]);
        }
        if (ctx_.channels && !spec) fail_at(start, "unknown channel '" + name + "'");
        if (spec && spec->is_categorical() && *op != Comparator::Eq)
            fail_at(start, "categorical channel " + name + " supports only '='");
        Threshold t = value(spec);
        return Formula::cmp(name, *op, std::move(t));
    }

    std::string_view s_;
    const ParseContext& ctx_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse(std::string_view text, const ParseContext& ctx = {}) {
    return detail::Parser(text, ctx).parse();
}

}  // namespace stlf
