#pragma once

#include <string>
#include <variant>

#include "stlfalsify/samplers/model.hpp"
#include "stlfalsify/sim/crosswalk.hpp"
#include "stlfalsify/sim/left_turn.hpp"

namespace stlf::sim {

using ScenarioConfig = std::variant<LeftTurnConfig, CrosswalkConfig>;

/// A simulator together with its disturbance channels and models.
class Scenario {
public:
    explicit Scenario(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
        std::visit([](const auto& c) { c.validate(); }, cfg_);
    }

    const ScenarioConfig& config() const { return cfg_; }
    bool is_left_turn() const { return std::holds_alternative<LeftTurnConfig>(cfg_); }

    std::string name() const { return std::visit([](const auto& c) { return c.name; }, cfg_); }
    double dt() const { return std::visit([](const auto& c) { return c.dt; }, cfg_); }
    std::size_t horizon() const { return std::visit([](const auto& c) { return c.horizon; }, cfg_); }

    ChannelList channels() const {
        if (is_left_turn()) return {left_turn_channel()};
        return crosswalk_channels();
    }

    /// The disturbance distribution the system actually faces.
    DisturbanceModel true_model() const { return model(1.0); }

    /// Importance-sampling proposal: uniform symbols for the left turn, doubled deviations for the crosswalk.
    DisturbanceModel proposal_model() const {
        if (is_left_turn()) {
            DisturbanceModel m{channels(), {CategoricalModel{std::vector<double>(kLtSymbols.size(), 1.0 / kLtSymbols.size())}}};
            m.validate();
            return m;
        }
        return model(2.0);
    }

    SimResult run(const SignalTrace& trace) const {
        if (auto lt = std::get_if<LeftTurnConfig>(&cfg_)) return LeftTurnSim(*lt).run(trace);
        return CrosswalkSim(std::get<CrosswalkConfig>(cfg_)).run(trace);
    }

    /// All-nominal disturbance trace (no disturbance, zero acceleration and noise).
    SignalTrace nominal_trace() const { return SignalTrace(channels(), horizon(), dt()); }

private:
    DisturbanceModel model(double sigma_scale) const {
        DisturbanceModel m{channels(), {}};
        if (is_left_turn()) {
            m.models.push_back(CategoricalModel{{kLtProbability.begin(), kLtProbability.end()}});
        } else {
            const auto& c = std::get<CrosswalkConfig>(cfg_);
            auto var = [&](double sd) { return sd * sd * sigma_scale * sigma_scale; };
            m.models.push_back(GaussianProcessModel{0.0, var(c.sigma_acc), c.length_scale});
            m.models.push_back(GaussianProcessModel{0.0, var(c.sigma_acc), c.length_scale});
            m.models.push_back(NormalModel{0.0, var(c.sigma_pos)});
            m.models.push_back(NormalModel{0.0, var(c.sigma_pos)});
            m.models.push_back(NormalModel{0.0, var(c.sigma_vel)});
            m.models.push_back(NormalModel{0.0, var(c.sigma_vel)});
        }
        m.validate();
        return m;
    }

    ScenarioConfig cfg_;
};

inline Scenario builtin_scenario(const std::string& id) {
    if (id == "lt1" || id == "lt2" || id == "lt3") return Scenario(left_turn_preset(id));
    if (id == "pc1" || id == "pc2") return Scenario(crosswalk_preset(id));
    throw std::invalid_argument("unknown scenario '" + id + "' (expected lt1, lt2, lt3, pc1, pc2)");
}

}  // namespace stlf::sim
