#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlfalsify/sim/geometry.hpp"
#include "stlfalsify/sim/idm.hpp"
#include "stlfalsify/sim/result.hpp"
#include "stlfalsify/stl/channel.hpp"
#include "stlfalsify/stl/trace.hpp"

namespace stlf::sim {

// Pedestrian crosswalk. The ego drives along +x in a single lane centered on y = 0;
// the pedestrian crosses along +y at the crosswalk x = 0.

inline constexpr std::array<const char*, 6> kPcChannels = {"a_x", "a_y", "n_x", "n_y", "n_vx", "n_vy"};

inline ChannelList crosswalk_channels() {
    return {ChannelSpec::continuous("a_x", -2.0, 2.0, "m/s^2", true),
            ChannelSpec::continuous("a_y", -2.0, 2.0, "m/s^2", true),
            ChannelSpec::continuous("n_x", -1.0, 1.0, "m", true),
            ChannelSpec::continuous("n_y", -1.0, 1.0, "m", true),
            ChannelSpec::continuous("n_vx", -2.0, 2.0, "m/s", true),
            ChannelSpec::continuous("n_vy", -2.0, 2.0, "m/s", true)};
}

struct CrosswalkConfig {
    std::string name = "pc1";
    double sigma_acc = 1.0;  // pedestrian acceleration GP standard deviation
    double sigma_pos = 0.2;  // position noise standard deviation
    double sigma_vel = 0.5;  // velocity noise standard deviation
    double length_scale = 0.4;
    double dt = 0.2;
    std::size_t horizon = 25;
    double ego_x = -35.0;
    double ego_v = 11.7;
    double ped_x = 0.0;
    double ped_y = -4.0;
    double ped_vy = 1.5;
    double lane_width = 3.7;
    double crosswalk_x = 0.0;
    double crosswalk_half_width = 1.5;  // ego stops this far short of the perceived pedestrian
    double zone_margin = 0.5;           // lateral margin around the lane for conflicts
    double prediction_cap = 4.0;        // s
    double vehicle_length = 4.5;
    double vehicle_width = 2.0;
    double pedestrian_size = 0.6;
    IdmParams idm{};

    void validate() const {
        if (!(dt > 0) || horizon < 1) throw std::invalid_argument("crosswalk: dt > 0 and horizon >= 1 required");
        if (!(sigma_acc > 0 && sigma_pos > 0 && sigma_vel > 0 && length_scale > 0))
            throw std::invalid_argument("crosswalk: noise parameters must be positive");
        if (!idm.valid()) throw std::invalid_argument("crosswalk: bad IDM parameters");
    }
};

struct CrosswalkState {
    double ego_x = 0.0;
    double ego_v = 0.0;
    double ped_x = 0.0;
    double ped_y = 0.0;
    double ped_vx = 0.0;
    double ped_vy = 0.0;
    // What the ego saw on the last step.
    double seen_x = 0.0;
    double seen_y = 0.0;
    double seen_vx = 0.0;
    double seen_vy = 0.0;
    bool yielding = false;
};

struct CrosswalkDisturbance {
    double a_x = 0, a_y = 0, n_x = 0, n_y = 0, n_vx = 0, n_vy = 0;
};

class CrosswalkSim {
public:
    explicit CrosswalkSim(CrosswalkConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    const CrosswalkConfig& config() const { return cfg_; }

    CrosswalkState initial_state() const {
        CrosswalkState s;
        s.ego_x = cfg_.ego_x;
        s.ego_v = cfg_.ego_v;
        s.ped_x = cfg_.ped_x + cfg_.crosswalk_x;
        s.ped_y = cfg_.ped_y;
        s.ped_vy = cfg_.ped_vy;
        s.seen_x = s.ped_x;
        s.seen_y = s.ped_y;
        s.seen_vy = s.ped_vy;
        return s;
    }

    bool is_failure(const CrosswalkState& s) const {
        Box e = bounding_box({s.ego_x, 0.0, 0.0}, cfg_.vehicle_length, cfg_.vehicle_width);
        Box p = bounding_box({s.ped_x, s.ped_y, 0.0}, cfg_.pedestrian_size, cfg_.pedestrian_size);
        return overlaps(e, p);
    }

    CrosswalkState step(CrosswalkState s, const CrosswalkDisturbance& d) const {
        // Perception: true pedestrian state plus sensor noise, no filtering.
        s.seen_x = s.ped_x + d.n_x;
        s.seen_y = s.ped_y + d.n_y;
        s.seen_vx = s.ped_vx + d.n_vx;
        s.seen_vy = s.ped_vy + d.n_vy;

        const double front = s.ego_x + cfg_.vehicle_length / 2;
        const double stop_line = s.seen_x - cfg_.crosswalk_half_width;
        double t_arrive = std::clamp((stop_line - front) / std::max(s.ego_v, 1.0), 0.0, cfg_.prediction_cap);
        // Lateral sweep of the perceived pedestrian until the ego arrives.
        double y_a = s.seen_y, y_b = s.seen_y + s.seen_vy * t_arrive;
        double zone = cfg_.lane_width / 2 + cfg_.zone_margin;
        s.yielding = std::max(y_a, y_b) >= -zone && std::min(y_a, y_b) <= zone &&
                     front < s.seen_x + cfg_.crosswalk_half_width;

        double a_ego = s.yielding
                           ? idm_accel(std::max(stop_line - front, 0.01) + cfg_.idm.s0, s.ego_v, 0.0, cfg_.idm)
                           : idm_accel(kFreeRoad, s.ego_v, 0.0, cfg_.idm);
        s.ego_v = std::max(0.0, s.ego_v + a_ego * cfg_.dt);
        s.ego_x += s.ego_v * cfg_.dt;

        s.ped_vx += d.a_x * cfg_.dt;
        s.ped_vy += d.a_y * cfg_.dt;
        s.ped_x += s.ped_vx * cfg_.dt;
        s.ped_y += s.ped_vy * cfg_.dt;
        return s;
    }

    static std::vector<std::string> columns() {
        return {"ego_x", "ego_y", "ego_v", "ped_x", "ped_y", "ped_vx", "ped_vy",
                "seen_x", "seen_y", "seen_vx", "seen_vy", "yielding", "collision"};
    }

    std::vector<double> row(const CrosswalkState& s, bool collision) const {
        return {s.ego_x, 0.0, s.ego_v, s.ped_x, s.ped_y, s.ped_vx, s.ped_vy,
                s.seen_x, s.seen_y, s.seen_vx, s.seen_vy, double(s.yielding), double(collision)};
    }

    SimResult run(const SignalTrace& trace) const {
        if (trace.horizon() < cfg_.horizon) throw std::invalid_argument("crosswalk: trace shorter than horizon");
        std::array<std::size_t, 6> ch{};
        for (std::size_t j = 0; j < ch.size(); ++j) {
            ch[j] = trace.channel(kPcChannels[j]);
            if (trace.channels()[ch[j]].is_categorical())
                throw std::invalid_argument(std::string("crosswalk: channel ") + kPcChannels[j] + " must be continuous");
        }
        SimResult r{cfg_.dt, columns(), {}, false, std::nullopt, trace};
        CrosswalkState s = initial_state();
        bool hit = is_failure(s);
        r.states.push_back(row(s, hit));
        for (std::size_t k = 0; k < cfg_.horizon && !hit; ++k) {
            CrosswalkDisturbance d{trace.real(ch[0], k), trace.real(ch[1], k), trace.real(ch[2], k),
                                   trace.real(ch[3], k), trace.real(ch[4], k), trace.real(ch[5], k)};
            s = step(s, d);
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
    CrosswalkConfig cfg_;
};

inline CrosswalkConfig crosswalk_preset(const std::string& id) {
    CrosswalkConfig c;
    c.name = id;
    if (id == "pc1") { c.sigma_acc = 1.0; c.sigma_pos = 0.2; c.sigma_vel = 0.5; }
    else if (id == "pc2") { c.sigma_acc = 1.0; c.sigma_pos = 1.0; c.sigma_vel = 1.0; }
    else throw std::invalid_argument("unknown crosswalk preset '" + id + "'");
    return c;
}

}  // namespace stlf::sim
