#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "stlfalsify/random.hpp"

namespace stlf {

namespace detail {

// Robert (1995) rejection samplers for N(0,1) restricted to [a, b].
template <class URBG>
double tn_standard(double a, double b, URBG& rng) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::normal_distribution<double> normal(0.0, 1.0);
    if (a == -inf && b == inf) return normal(rng);
    if (b < 0) return -tn_standard(-b, -a, rng);

    if (a <= 0 && b >= 0) {
        // Interval contains the mode.
        if (b - a >= std::sqrt(2 * std::numbers::pi)) {
            for (;;) {
                double z = normal(rng);
                if (z >= a && z <= b) return z;
            }
        }
        std::uniform_real_distribution<double> u(a, b);
        for (;;) {
            double z = u(rng);
            if (uniform01(rng) <= std::exp(-0.5 * z * z)) return z;
        }
    }

    // 0 <= a < b
    double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    double uniform_limit = a + 2.0 / (a + std::sqrt(a * a + 4.0)) *
                                   std::exp(0.25 * (a * a - a * std::sqrt(a * a + 4.0)) + 0.5);
    if (b <= uniform_limit) {
        std::uniform_real_distribution<double> u(a, b);
        for (;;) {
            double z = u(rng);
            if (uniform01(rng) <= std::exp(0.5 * (a * a - z * z))) return z;
        }
    }
    std::exponential_distribution<double> ex(alpha);
    for (;;) {
        double z = a + ex(rng);
        if (z > b) continue;
        double d = z - alpha;
        if (uniform01(rng) <= std::exp(-0.5 * d * d)) return z;
    }
}

}  // namespace detail

/// One draw from N(mean, sd^2) conditioned on [lo, hi]; the result always lies in [lo, hi].
template <class URBG>
double sample_truncated_normal(double mean, double sd, double lo, double hi, URBG& rng) {
    if (!(lo <= hi)) throw std::invalid_argument("truncated normal: lo > hi");
    if (!(sd > 0)) throw std::invalid_argument("truncated normal: sd must be positive");
    if (lo == hi) return lo;
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    if (!(a < b)) return std::clamp(mean, lo, hi);
    double x = mean + sd * detail::tn_standard(a, b, rng);
    return std::clamp(x, lo, hi);
}

}  // namespace stlf
