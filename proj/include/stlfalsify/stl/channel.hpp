#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace stlf {

struct ContinuousKind {
    double x_min = 0.0;
    double x_max = 1.0;
    std::string units;
    // Values may leave [x_min, x_max]; the range then only grounds grammar thresholds.
    bool unbounded = false;
};

struct CategoricalKind {
    std::vector<std::string> symbols;
    std::vector<std::string> descriptions;  // optional, parallel to symbols
    std::map<std::string, std::string, std::less<>> aliases;
};

struct ChannelSpec {
    std::string id;
    std::variant<ContinuousKind, CategoricalKind> kind;

    static ChannelSpec continuous(std::string id, double lo, double hi, std::string units = {},
                                  bool unbounded = false) {
        return {std::move(id), ContinuousKind{lo, hi, std::move(units), unbounded}};
    }
    static ChannelSpec categorical(std::string id, std::vector<std::string> symbols) {
        return {std::move(id), CategoricalKind{std::move(symbols), {}, {}}};
    }

    bool is_categorical() const { return std::holds_alternative<CategoricalKind>(kind); }
    const ContinuousKind& continuous_kind() const { return std::get<ContinuousKind>(kind); }
    const CategoricalKind& categorical_kind() const { return std::get<CategoricalKind>(kind); }

    std::size_t symbol_count() const { return categorical_kind().symbols.size(); }

    /// Symbol index by name or alias.
    std::optional<std::size_t> symbol_index(std::string_view name) const {
        const auto& c = categorical_kind();
        std::string_view target = name;
        if (auto it = c.aliases.find(name); it != c.aliases.end()) target = it->second;
        for (std::size_t i = 0; i < c.symbols.size(); ++i)
            if (c.symbols[i] == target) return i;
        return std::nullopt;
    }

    /// Interval a sampler must respect when no formula constrains the channel.
    std::pair<double, double> default_bounds() const {
        const auto& c = continuous_kind();
        if (c.unbounded) {
            constexpr double inf = std::numeric_limits<double>::infinity();
            return {-inf, inf};
        }
        return {c.x_min, c.x_max};
    }

    void validate() const {
        if (id.empty()) throw std::invalid_argument("channel id is empty");
        if (auto c = std::get_if<ContinuousKind>(&kind)) {
            if (!(c->x_min < c->x_max))
                throw std::invalid_argument("channel " + id + ": x_min must be < x_max");
            return;
        }
        const auto& c = categorical_kind();
        if (c.symbols.empty()) throw std::invalid_argument("channel " + id + ": empty symbol list");
        if (c.symbols.size() > 64) throw std::invalid_argument("channel " + id + ": more than 64 symbols");
        std::set<std::string> seen(c.symbols.begin(), c.symbols.end());
        if (seen.size() != c.symbols.size())
            throw std::invalid_argument("channel " + id + ": duplicate symbols");
        if (!c.descriptions.empty() && c.descriptions.size() != c.symbols.size())
            throw std::invalid_argument("channel " + id + ": descriptions do not match symbols");
        for (const auto& [alias, target] : c.aliases)
            if (!seen.count(target))
                throw std::invalid_argument("channel " + id + ": alias " + alias + " has no target");
    }
};

using ChannelList = std::vector<ChannelSpec>;

inline std::optional<std::size_t> find_channel(const ChannelList& channels, std::string_view id) {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].id == id) return i;
    return std::nullopt;
}

inline std::size_t require_channel(const ChannelList& channels, std::string_view id) {
    if (auto i = find_channel(channels, id)) return *i;
    throw std::invalid_argument("unknown channel '" + std::string(id) + "'");
}

}  // namespace stlf
