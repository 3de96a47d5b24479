#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace stlf::sim {

struct IdmParams {
    double v0 = 29.0;       // desired velocity, m/s
    double s0 = 5.0;        // minimum spacing, m
    double a_max = 3.0;     // m/s^2
    double b = 2.0;         // comfortable deceleration, m/s^2
    double headway = 1.5;   // s
    double delta = 4.0;

    bool valid() const { return v0 > 0 && s0 > 0 && a_max > 0 && b > 0 && headway > 0 && delta > 0; }
};

inline constexpr double kFreeRoad = std::numeric_limits<double>::infinity();

/// Intelligent driver model acceleration, clamped to [-2b, a_max]. gap = kFreeRoad for no leader.
inline double idm_accel(double gap, double v, double v_lead, const IdmParams& p) {
    double free = 1.0 - std::pow(v / p.v0, p.delta);
    double interaction = 0.0;
    if (std::isfinite(gap)) {
        double s_star = p.s0 + v * p.headway + v * (v - v_lead) / (2.0 * std::sqrt(p.a_max * p.b));
        interaction = (s_star / gap) * (s_star / gap);
    }
    return std::clamp(p.a_max * (free - interaction), -2.0 * p.b, p.a_max);
}

}  // namespace stlf::sim
