#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "loewner/core.hpp"

namespace loewner {

/// Piecewise-linear function sampled on an increasing grid.
struct Table {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double at) const {
        if (x.empty()) throw std::logic_error("empty table");
        if (at <= x.front()) return y.front();
        if (at >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), at);
        const size_t hi = static_cast<size_t>(it - x.begin());
        const size_t lo = hi - 1;
        const double w = (at - x[lo]) / (x[hi] - x[lo]);
        return y[lo] + w * (y[hi] - y[lo]);
    }

    bool strictly_increasing() const {
        for (size_t i = 1; i < y.size(); ++i)
            if (!(y[i] > y[i - 1])) return false;
        return true;
    }
};

/// Unimodular samples on a time grid; interpolated linearly in the unwrapped
/// angle, or held constant on each interval.
struct DrivingTable {
    enum class Interp { Linear, PiecewiseConstant };

    std::vector<double> t;
    std::vector<cplx> xi;
    Interp interp = Interp::Linear;

    static DrivingTable constant(cplx value, double t_end) { return {{0.0, t_end}, {value, value}, Interp::Linear}; }

    cplx operator()(double at) const {
        if (t.empty()) throw std::logic_error("empty driving table");
        if (at <= t.front()) return unit(xi.front());
        if (at >= t.back()) return unit(xi.back());
        const auto it = std::upper_bound(t.begin(), t.end(), at);
        const size_t hi = static_cast<size_t>(it - t.begin());
        const size_t lo = hi - 1;
        if (interp == Interp::PiecewiseConstant) return unit(xi[lo]);
        const double w = (at - t[lo]) / (t[hi] - t[lo]);
        const double dtheta = std::arg(xi[hi] / xi[lo]);
        return unit(xi[lo]) * std::polar(1.0, w * dtheta);
    }

    /// Largest angular jump between adjacent samples.
    double max_jump() const {
        double worst = 0.0;
        for (size_t i = 1; i < xi.size(); ++i) worst = std::max(worst, std::abs(std::arg(xi[i] / xi[i - 1])));
        return worst;
    }
};

}  // namespace loewner
