#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stlfalsify/stl/trace.hpp"

namespace stlf::sim {

/// Rollout record: one state row per time t = k*dt, k = 0 .. last step simulated.
struct SimResult {
    double dt = 0.0;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> states;
    bool failure = false;
    std::optional<std::size_t> failure_step;  // row index of the first colliding state
    SignalTrace disturbances;

    std::optional<double> failure_time() const {
        if (!failure_step) return std::nullopt;
        return static_cast<double>(*failure_step) * dt;
    }
};

}  // namespace stlf::sim
