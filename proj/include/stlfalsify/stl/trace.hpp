#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlfalsify/stl/channel.hpp"
#include "stlfalsify/stl/number.hpp"

namespace stlf {

/// m x n grid of channel values. Categorical entries hold the symbol index.
class SignalTrace {
public:
    SignalTrace(ChannelList channels, std::size_t horizon, double dt)
        : channels_(std::move(channels)), horizon_(horizon), dt_(dt),
          columns_(channels_.size(), std::vector<double>(horizon, 0.0)) {
        if (!(dt > 0)) throw std::invalid_argument("trace dt must be positive");
        for (const auto& c : channels_) c.validate();
    }

    std::size_t horizon() const { return horizon_; }
    double dt() const { return dt_; }
    const ChannelList& channels() const { return channels_; }
    std::size_t channel_count() const { return channels_.size(); }
    std::size_t channel(std::string_view id) const { return require_channel(channels_, id); }

    double real(std::size_t ch, std::size_t step) const {
        check(ch, step);
        return columns_[ch][step];
    }
    std::size_t symbol(std::size_t ch, std::size_t step) const {
        check(ch, step);
        return static_cast<std::size_t>(columns_[ch][step]);
    }
    void set_real(std::size_t ch, std::size_t step, double v) {
        check(ch, step);
        columns_[ch][step] = v;
    }
    void set_symbol(std::size_t ch, std::size_t step, std::size_t s) {
        check(ch, step);
        if (s >= channels_[ch].symbol_count()) throw std::out_of_range("symbol index out of range");
        columns_[ch][step] = static_cast<double>(s);
    }

    std::span<const double> column(std::size_t ch) const { return columns_.at(ch); }

    /// Value as text (symbol name for categorical channels).
    std::string text(std::size_t ch, std::size_t step) const {
        if (channels_.at(ch).is_categorical()) return channels_[ch].categorical_kind().symbols.at(symbol(ch, step));
        return format_number(real(ch, step));
    }

    void validate() const {
        for (std::size_t j = 0; j < channels_.size(); ++j) {
            const auto& spec = channels_[j];
            for (double v : columns_[j]) {
                if (spec.is_categorical()) {
                    if (v < 0 || v >= static_cast<double>(spec.symbol_count()) || v != std::floor(v))
                        throw std::domain_error("channel " + spec.id + ": invalid symbol");
                } else {
                    const auto& c = spec.continuous_kind();
                    if (std::isnan(v)) throw std::domain_error("channel " + spec.id + ": NaN value");
                    if (!c.unbounded && (v < c.x_min || v > c.x_max))
                        throw std::domain_error("channel " + spec.id + ": value outside declared range");
                }
            }
        }
    }

    friend bool operator==(const SignalTrace& a, const SignalTrace& b) {
        return a.horizon_ == b.horizon_ && a.dt_ == b.dt_ && a.columns_ == b.columns_;
    }

private:
    void check(std::size_t ch, std::size_t step) const {
        if (ch >= columns_.size() || step >= horizon_) throw std::out_of_range("trace index out of range");
    }

    ChannelList channels_;
    std::size_t horizon_;
    double dt_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace stlf
