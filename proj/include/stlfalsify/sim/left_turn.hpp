#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlfalsify/sim/geometry.hpp"
#include "stlfalsify/sim/idm.hpp"
#include "stlfalsify/sim/result.hpp"
#include "stlfalsify/stl/channel.hpp"
#include "stlfalsify/stl/trace.hpp"

namespace stlf::sim {

// Unprotected left turn. The ego drives north in the right lane (x = +w/2) and
// turns left (west) across the southbound lane (x = -w/2) used by the adversary.

enum class LtDisturbance : std::size_t { None, DecelMedium, DecelMajor, AccelMedium, AccelMajor, Signal, Intention };

inline constexpr std::array<const char*, 7> kLtSymbols = {"none", "d_med", "d_maj", "a_med", "a_maj", "S", "L"};
inline constexpr std::array<double, 7> kLtAcceleration = {0.0, -1.5, -3.0, 1.5, 3.0, 0.0, 0.0};
inline constexpr std::array<double, 7> kLtProbability = {0.976, 0.01, 0.001, 0.01, 0.001, 0.001, 0.001};

inline ChannelSpec left_turn_channel() {
    CategoricalKind kind;
    for (auto s : kLtSymbols) kind.symbols.emplace_back(s);
    kind.descriptions = {"the vehicle has no disturbance",
                         "the vehicle performs a medium deceleration",
                         "the vehicle performs a major deceleration",
                         "the vehicle performs a medium acceleration",
                         "the vehicle performs a major acceleration",
                         "the vehicle toggles its turn signal",
                         "the vehicle toggles its turn intention"};
    kind.aliases = {{"∅", "none"}, {"B", "S"}};
    return {"adv", std::move(kind)};
}

struct LeftTurnConfig {
    std::string name = "lt1";
    double s_ego = 15.0;  // ego distance to the intersection center, m
    double v_ego = 9.0;
    double s_adv = 29.0;
    double v_adv = 10.0;
    double dt = 0.18;
    std::size_t horizon = 20;
    double lane_width = 3.7;
    double vehicle_length = 4.5;
    double vehicle_width = 2.0;
    double turn_radius = 6.0;            // ego left-turn arc
    double adversary_turn_radius = 3.0;  // adversary right turn when its intention is set
    double adversary_turn_offset = 6.0;  // turn starts this far north of the conflict point
    double adversary_turn_speed = 4.0;   // adversary desired speed once it intends to turn
    double curve_speed = 9.0;            // ego desired speed inside the turn
    double commit_buffer = -2.0;         // conflict point offset along the ego path
    double adversary_delta = 2.0;
    IdmParams idm{};

    void validate() const {
        if (!(dt > 0) || horizon < 1) throw std::invalid_argument("left turn: dt > 0 and horizon >= 1 required");
        if (!(turn_radius > lane_width / 2)) throw std::invalid_argument("left turn: turn radius too small");
        if (!(s_ego > lane_width / 2) || !(s_adv > 0) || !(v_adv > 0) || v_ego < 0)
            throw std::invalid_argument("left turn: bad initial conditions");
        if (!idm.valid()) throw std::invalid_argument("left turn: bad IDM parameters");
    }
};

struct LeftTurnState {
    double p = 0.0;  // ego path length travelled
    double q = 0.0;  // adversary path length travelled
    double v_ego = 0.0;
    double v_adv = 0.0;
    bool committed = false;
    bool signal = false;
    bool intention = false;
    std::optional<double> turn_q;  // adversary path length where its right turn began
};

class LeftTurnSim {
public:
    explicit LeftTurnSim(LeftTurnConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        const double w = cfg_.lane_width;
        y0_ = -w / 2;
        l1_ = cfg_.s_ego + y0_;
        p_end_ = l1_ + std::numbers::pi * cfg_.turn_radius / 2;
        double cth = std::acos(1.0 - w / cfg_.turn_radius);
        p_cross_ = l1_ + cth * cfg_.turn_radius;
        y_cross_ = y0_ + cfg_.turn_radius * std::sin(cth);
        p_conf_ = p_cross_ + cfg_.commit_buffer;
        p_stop_ = l1_ - cfg_.vehicle_length / 2;
        y_enter_ = y_cross_ + cfg_.vehicle_length;
        y_turn_ = y_cross_ + cfg_.adversary_turn_offset;
    }

    const LeftTurnConfig& config() const { return cfg_; }

    LeftTurnState initial_state() const {
        LeftTurnState s;
        s.v_ego = cfg_.v_ego;
        s.v_adv = cfg_.v_adv;
        return s;
    }

    Pose ego_pose(double p) const {
        const double w = cfg_.lane_width, r = cfg_.turn_radius;
        if (p <= l1_) return {w / 2, -cfg_.s_ego + p, std::numbers::pi / 2};
        if (p <= p_end_) {
            double th = (p - l1_) / r;
            return {w / 2 - r + r * std::cos(th), y0_ + r * std::sin(th), std::numbers::pi / 2 + th};
        }
        return {w / 2 - r - (p - p_end_), y0_ + r, std::numbers::pi};
    }

    Pose adversary_pose(double q, std::optional<double> turn_q) const {
        const double w = cfg_.lane_width, r = cfg_.adversary_turn_radius;
        if (!turn_q || q <= *turn_q) return {-w / 2, cfg_.s_adv - q, -std::numbers::pi / 2};
        double yt = cfg_.s_adv - *turn_q;
        double arc = std::numbers::pi * r / 2;
        if (q <= *turn_q + arc) {
            double th = (q - *turn_q) / r;
            return {-w / 2 - r + r * std::cos(th), yt - r * std::sin(th), -std::numbers::pi / 2 - th};
        }
        return {-w / 2 - r - (q - *turn_q - arc), yt - r, std::numbers::pi};
    }

    bool is_failure(const LeftTurnState& s) const {
        Box e = bounding_box(ego_pose(s.p), cfg_.vehicle_length, cfg_.vehicle_width);
        Box a = bounding_box(adversary_pose(s.q, s.turn_q), cfg_.vehicle_length, cfg_.vehicle_width);
        return overlaps(e, a);
    }

    /// One Euler step with the adversary disturbance applied first.
    LeftTurnState step(LeftTurnState s, LtDisturbance d) const {
        const auto di = static_cast<std::size_t>(d);
        if (di >= kLtSymbols.size()) throw std::invalid_argument("left turn: unknown disturbance");
        if (d == LtDisturbance::Signal) s.signal = !s.signal;
        if (d == LtDisturbance::Intention) s.intention = !s.intention;

        const double ya = cfg_.s_adv - s.q;
        if (!s.committed) {
            // Go when the adversary has passed or turned, signals a turn, or arrives after the ego clears.
            bool passed = s.turn_q.has_value() || ya < y_cross_ - cfg_.vehicle_length;
            double t_adv = s.v_adv > 0.1 ? (ya - y_enter_) / s.v_adv : std::numeric_limits<double>::infinity();
            double t_cross = (p_conf_ - s.p) / std::max(s.v_ego, 1.0);
            if (passed || s.signal || t_adv > t_cross) s.committed = true;
        }
        // The right turn is only taken if the adversary has slowed enough to make it.
        if (!s.turn_q && s.intention && ya <= y_turn_ + 2.0 && ya > y_turn_ &&
            s.v_adv <= cfg_.adversary_turn_speed + 1.0)
            s.turn_q = s.q;

        IdmParams ego = cfg_.idm;
        double a_ego;
        if (s.committed) {
            bool in_curve = s.p >= l1_ && s.p <= p_cross_ + 3.0;
            if (in_curve) ego.v0 = cfg_.curve_speed;
            a_ego = idm_accel(kFreeRoad, s.v_ego, 0.0, ego);
        } else {
            a_ego = idm_accel(std::max(p_stop_ + ego.s0 - s.p, 0.01), s.v_ego, 0.0, ego);
        }
        IdmParams adv = cfg_.idm;
        adv.v0 = s.intention || s.turn_q ? cfg_.adversary_turn_speed : cfg_.v_adv;
        adv.delta = cfg_.adversary_delta;
        // A turning adversary merges behind an ego already in the intersection and follows it.
        double gap = kFreeRoad, v_lead = 0.0;
        if (s.intention && s.committed && s.p >= l1_) {
            Pose e = ego_pose(s.p), a = adversary_pose(s.q, s.turn_q);
            gap = std::max(std::hypot(e.x - a.x, e.y - a.y) - cfg_.vehicle_length, 0.01);
            v_lead = s.v_ego;
        }
        double a_adv = idm_accel(gap, s.v_adv, v_lead, adv) + kLtAcceleration[di];

        s.v_ego = std::max(0.0, s.v_ego + a_ego * cfg_.dt);
        s.v_adv = std::max(0.0, s.v_adv + a_adv * cfg_.dt);
        s.p += s.v_ego * cfg_.dt;
        s.q += s.v_adv * cfg_.dt;
        return s;
    }

    static std::vector<std::string> columns() {
        return {"ego_x", "ego_y", "ego_heading", "ego_v", "adv_x", "adv_y", "adv_heading", "adv_v",
                "signal", "intention", "committed", "collision"};
    }

    std::vector<double> row(const LeftTurnState& s, bool collision) const {
        Pose e = ego_pose(s.p), a = adversary_pose(s.q, s.turn_q);
        return {e.x, e.y, e.heading, s.v_ego, a.x, a.y, a.heading, s.v_adv,
                double(s.signal), double(s.intention), double(s.committed), double(collision)};
    }

    SimResult run(const SignalTrace& trace) const {
        if (trace.horizon() < cfg_.horizon) throw std::invalid_argument("left turn: trace shorter than horizon");
        std::size_t ch = trace.channel("adv");
        if (!trace.channels()[ch].is_categorical() || trace.channels()[ch].symbol_count() != kLtSymbols.size())
            throw std::invalid_argument("left turn: channel 'adv' must carry the seven disturbance symbols");
        SimResult r{cfg_.dt, columns(), {}, false, std::nullopt, trace};
        LeftTurnState s = initial_state();
        bool hit = is_failure(s);
        r.states.push_back(row(s, hit));
        for (std::size_t k = 0; k < cfg_.horizon && !hit; ++k) {
            s = step(s, static_cast<LtDisturbance>(trace.symbol(ch, k)));
            hit = is_failure(s);
            r.states.push_back(row(s, hit));
        }
        if (hit) {
            r.failure = true;
            r.failure_step = r.states.size() - 1;
        }
        return r;
    }

private:
    LeftTurnConfig cfg_;
    double y0_, l1_, p_end_, p_cross_, y_cross_, p_conf_, p_stop_, y_enter_, y_turn_;
};

inline LeftTurnConfig left_turn_preset(const std::string& id) {
    LeftTurnConfig c;
    c.name = id;
    if (id == "lt1") { c.s_ego = 15; c.v_ego = 9; c.s_adv = 29; c.v_adv = 10; }
    else if (id == "lt2") { c.s_ego = 15; c.v_ego = 9; c.s_adv = 29; c.v_adv = 20; }
    else if (id == "lt3") { c.s_ego = 19; c.v_ego = 9; c.s_adv = 43; c.v_adv = 29; }
    else throw std::invalid_argument("unknown left-turn preset '" + id + "'");
    return c;
}

}  // namespace stlf::sim
