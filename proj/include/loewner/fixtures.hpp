#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "loewner/geometry.hpp"

namespace loewner::fixtures {

/// Radial slit [x, 1) with x = 3 - 2*sqrt(2); its lmr is exactly log 2.
inline SlitSystem single_radial() {
    const double x = 3.0 - 2.0 * std::sqrt(2.0);
    return {{Slit{{1.0, x}}}, 1.5};
}

/// [0.5, 1) and (-1, -0.5]; lmr = log(1.5625)/2.
inline SlitSystem symmetric_pair() { return {{Slit{{1.0, 0.5}}, Slit{{-1.0, -0.5}}}, 1.5}; }

inline SlitSystem asymmetric_pair() {
    const cplx b = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    return {{Slit{{1.0, 0.5}}, Slit{{b, 0.7 * b}}}, 1.5};
}

/// Polyline arc spiralling inward from angle th0 to th1 while the radius
/// drops from 1 to r1.
inline Slit polyline_arc(double th0, double th1, double r1, int segments) {
    Slit s;
    for (int i = 0; i <= segments; ++i) {
        const double f = static_cast<double>(i) / segments;
        s.points.push_back(std::polar(1.0 - (1.0 - r1) * f, th0 + (th1 - th0) * f));
    }
    s.points.front() = std::polar(1.0, th0);
    return s;
}

/// Two curved polylines with corners.
inline SlitSystem curved_pair() {
    return {{polyline_arc(0.0, 0.6, 0.55, 12), polyline_arc(std::numbers::pi, std::numbers::pi - 0.5, 0.6, 10)}, 1.5};
}

inline std::vector<std::string> names() { return {"single", "symmetric", "asymmetric", "curved"}; }

inline SlitSystem by_name(const std::string& name) {
    if (name == "single") return single_radial();
    if (name == "symmetric") return symmetric_pair();
    if (name == "asymmetric") return asymmetric_pair();
    if (name == "curved") return curved_pair();
    throw std::invalid_argument("unknown fixture '" + name + "'");
}

}  // namespace loewner::fixtures
