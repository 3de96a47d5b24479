#pragma once

#include <cmath>

namespace stlf::sim {

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // radians, 0 along +x
};

struct Box {
    double x_min, x_max, y_min, y_max;
};

/// Axis-aligned box enclosing a length x width rectangle at the given pose.
inline Box bounding_box(const Pose& p, double length, double width) {
    double c = std::abs(std::cos(p.heading));
    double s = std::abs(std::sin(p.heading));
    double hx = 0.5 * (length * c + width * s);
    double hy = 0.5 * (length * s + width * c);
    return {p.x - hx, p.x + hx, p.y - hy, p.y + hy};
}

/// Closed overlap: touching edges count.
inline bool overlaps(const Box& a, const Box& b) {
    return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max && b.y_min <= a.y_max;
}

}  // namespace stlf::sim
