#pragma once

// Forward side of the constant-coefficient radial equation
//
//     dh/dt = h * sum_k lambda_k (xi_k(t) + h) / (xi_k(t) - h),   h_0(z) = z,
//
// in the disk: pointwise integration of the ODE, and regeneration of the
// slits by composing exact single-slit maps.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "loewner/core.hpp"
#include "loewner/geometry.hpp"
#include "loewner/table.hpp"
#include "loewner/zipper.hpp"

namespace loewner::evolution {

/// Tip radius x of the radial slit [x, 1) whose complement has lmr `capacity`,
/// i.e. (1 + x)^2 / (4x) = exp(capacity).
inline double radial_tip(double capacity) {
    const double c = std::exp(capacity);
    // smaller root of x^2 + (2 - 4c) x + 1 = 0, written without cancellation
    return 1.0 / (2.0 * c - 1.0 + 2.0 * std::sqrt(c * c - c));
}

/// Normalized map of the disk minus the radial slit from `base` inward with
/// the given lmr, onto the disk.
struct RadialSlitMap {
    cplx base{1.0, 0.0};
    double capacity = 0;

    double c() const { return std::exp(capacity); }
    cplx tip() const { return base * radial_tip(capacity); }

    cplx operator()(cplx z) const {
        const double cc = c();
        // near the antipode of the base, work with the reciprocal of q
        if (std::abs(base + z) < std::abs(base - z)) {
            const cplx p = (base + z) / (base - z);
            const cplx r = p / std::sqrt(cc - (cc - 1.0) * p * p);
            return base * (r - 1.0) / (r + 1.0);
        }
        const cplx q = (base - z) / (base + z);
        const cplx qn = std::sqrt(cc * q * q - (cc - 1.0));
        return base * (1.0 - qn) / (1.0 + qn);
    }

    /// Image of a circle point other than `base`.
    cplx on_circle(cplx z) const {
        const double cc = c();
        const double half = 0.5 * std::arg(z / base);
        const double s = std::sin(half), co = std::cos(half);
        const double out = std::atan2(std::copysign(std::sqrt(cc * s * s + (cc - 1.0) * co * co), s), std::abs(co));
        return base * std::polar(1.0, 2.0 * out);
    }

    cplx inverse(cplx w) const {
        const double cc = c();
        if (std::abs(base + w) < std::abs(base - w)) {
            const cplx pn = (base + w) / (base - w);
            const cplx r = std::sqrt(cc) * pn / std::sqrt(1.0 + (cc - 1.0) * pn * pn);
            return base * (r - 1.0) / (r + 1.0);
        }
        const cplx qn = (base - w) / (base + w);
        const cplx q = std::sqrt((qn * qn + (cc - 1.0)) / cc);
        return base * (1.0 - q) / (1.0 + q);
    }
};

struct TraceOptions {
    /// Driving points closer than this are a collision.
    double collision_threshold = 1e-9;
};

struct TraceResult {
    std::vector<double> times;
    std::vector<std::vector<cplx>> traces;  // traces[k][n]: tip of slit k at times[n]
    /// Largest distance between consecutive trace points: the resolution of
    /// the regenerated curves.
    double scale = 0;
};

/// Regenerates slits from weights and driving functions on [0, L] with
/// `steps` splitting steps. Each step composes one radial slit map per slit
/// (capacity lambda_k * dt, based at the transported driving point); the slit
/// order alternates between steps.
inline TraceResult regenerate_traces(std::span<const double> lambda, std::span<const DrivingTable> xi, double L,
                                     int steps, const TraceOptions& opts = {}) {
    const size_t m = lambda.size();
    if (xi.size() != m) throw std::invalid_argument("one driving function per weight required");
    if (steps < 1 || !(L > 0.0)) throw std::invalid_argument("need steps >= 1 and L > 0");
    const double dt = L / steps;
    TraceResult out;
    out.traces.resize(m);
    out.times.push_back(0.0);
    for (size_t k = 0; k < m; ++k) out.traces[k].push_back(unit(xi[k](0.0)));
    std::vector<RadialSlitMap> maps;
    maps.reserve(static_cast<size_t>(steps) * m);
    std::vector<size_t> order(m);
    for (int n = 0; n < steps; ++n) {
        const double t = n * dt;
        std::vector<cplx> drive(m);
        for (size_t k = 0; k < m; ++k) drive[k] = unit(xi[k](t));
        for (size_t a = 0; a < m; ++a)
            for (size_t b = a + 1; b < m; ++b)
                if (std::abs(drive[a] - drive[b]) < opts.collision_threshold)
                    throw GeometricConflict("driving points of slits " + std::to_string(a) + " and " +
                                            std::to_string(b) + " collide at t = " + std::to_string(t));
        std::iota(order.begin(), order.end(), size_t{0});
        if (n % 2 == 1) std::reverse(order.begin(), order.end());
        std::vector<cplx> tips(m);
        const size_t first = maps.size();
        for (size_t k : order) {
            cplx b = drive[k];
            for (size_t i = first; i < maps.size(); ++i) b = maps[i].on_circle(b);
            const RadialSlitMap g{b, lambda[k] * dt};
            cplx p = g.tip();
            for (size_t i = maps.size(); i-- > 0;) p = maps[i].inverse(p);
            tips[k] = p;
            maps.push_back(g);
        }
        out.times.push_back(t + dt);
        for (size_t k = 0; k < m; ++k) {
            if (lambda[k] > 0.0) out.scale = std::max(out.scale, std::abs(tips[k] - out.traces[k].back()));
            out.traces[k].push_back(tips[k]);
        }
    }
    return out;
}

struct ForwardOptions {
    double abs_tolerance = 1e-12;
    double rel_tolerance = 1e-12;
    double absorption_threshold = 1e-7;
    double min_step = 1e-18;
    /// Number of output intervals on [0, L].
    int samples = 64;
};

struct Trajectory {
    cplx start;
    std::vector<cplx> values;  // h_t(start) at the output times it survived
    std::optional<double> absorbed_at;
    std::optional<size_t> absorbed_by;
};

struct ForwardSolveResult {
    std::vector<double> times;
    /// log h_t'(0) integrated alongside the points; equals t.
    std::vector<double> log_derivative_at_0;
    std::vector<Trajectory> trajectories;

    std::vector<double> flow_derivative_at_0() const {
        std::vector<double> v;
        for (double x : log_derivative_at_0) v.push_back(std::exp(x));
        return v;
    }
};

namespace detail {

using State = std::array<double, 2>;

inline cplx vector_field(std::span<const double> lambda, std::span<const cplx> drive, cplx h) {
    cplx sum{0.0, 0.0};
    for (size_t k = 0; k < lambda.size(); ++k) sum += lambda[k] * (drive[k] + h) / (drive[k] - h);
    return h * sum;
}

/// Breakpoints of all driving tables inside (a, b).
inline std::vector<double> breakpoints(std::span<const DrivingTable> xi, double a, double b) {
    std::vector<double> pts{a, b};
    for (const auto& d : xi)
        for (double t : d.t)
            if (t > a && t < b) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace detail

/// Integrates the equation for each initial point with an adaptive
/// Dormand-Prince stepper, restarting at every driving-table node. Points
/// that run into a driving point are reported as absorbed.
inline ForwardSolveResult solve_forward(std::span<const double> lambda, std::span<const DrivingTable> xi, double L,
                                        std::span<const cplx> initial, const ForwardOptions& opts = {}) {
    namespace ode = boost::numeric::odeint;
    const size_t m = lambda.size();
    if (xi.size() != m) throw std::invalid_argument("one driving function per weight required");
    if (!(L >= 0.0) || opts.samples < 1) throw std::invalid_argument("need L >= 0 and samples >= 1");
    for (double l : lambda)
        if (!(l >= 0.0)) throw std::invalid_argument("weights must be nonnegative");

    ForwardSolveResult out;
    for (int i = 0; i <= opts.samples; ++i) out.times.push_back(L * i / opts.samples);

    auto drive_at = [&](double t, double toward) {
        // evaluate inside the current interval so piecewise-constant tables
        // use the value of the interval being integrated
        std::vector<cplx> d(m);
        for (size_t k = 0; k < m; ++k) d[k] = xi[k](t + 1e-13 * (toward - t));
        return d;
    };

    using Stepper = ode::runge_kutta_dopri5<detail::State>;
    auto integrate_piece = [&](detail::State& x, double a, double b, auto&& rhs, auto&& after_step) -> bool {
        auto stepper = ode::make_controlled<Stepper>(opts.abs_tolerance, opts.rel_tolerance);
        double t = a;
        double dt = std::min(1e-3, b - a);
        while (t < b) {
            if (t + dt > b) dt = b - t;
            const auto result = stepper.try_step(rhs, x, t, dt);
            if (result == ode::fail) {
                if (dt < opts.min_step) throw NonConvergence("forward solve: step size underflow");
                continue;
            }
            if (!after_step(x, t)) return false;
        }
        return true;
    };

    // log-derivative channel: d/dt log h'(0) = sum_k lambda_k Re Phi(xi_k, 0)
    {
        detail::State y{0.0, 0.0};
        out.log_derivative_at_0.push_back(0.0);
        for (size_t i = 0; i + 1 < out.times.size(); ++i) {
            const auto pts = detail::breakpoints(xi, out.times[i], out.times[i + 1]);
            for (size_t p = 0; p + 1 < pts.size(); ++p) {
                const auto d = drive_at(pts[p], pts[p + 1]);
                auto rhs = [&](const detail::State&, detail::State& dy, double) {
                    double s = 0.0;
                    for (size_t k = 0; k < m; ++k) s += lambda[k] * zipper::kernel(d[k], cplx{0.0, 0.0}).real();
                    dy = {s, 0.0};
                };
                integrate_piece(y, pts[p], pts[p + 1], rhs, [](const detail::State&, double) { return true; });
            }
            out.log_derivative_at_0.push_back(y[0]);
        }
    }

    for (const cplx z0 : initial) {
        if (!(std::abs(z0) < 1.0)) throw std::invalid_argument("initial points must lie in the open disk");
        Trajectory tr;
        tr.start = z0;
        tr.values.push_back(z0);
        detail::State x{z0.real(), z0.imag()};
        bool alive = true;
        for (size_t i = 0; i + 1 < out.times.size() && alive; ++i) {
            const auto pts = detail::breakpoints(xi, out.times[i], out.times[i + 1]);
            for (size_t p = 0; p + 1 < pts.size() && alive; ++p) {
                const bool constant = std::all_of(xi.begin(), xi.end(), [](const DrivingTable& d) {
                    return d.interp == DrivingTable::Interp::PiecewiseConstant;
                });
                const auto d = drive_at(pts[p], pts[p + 1]);
                const double a = pts[p], b = pts[p + 1];
                auto rhs = [&](const detail::State& s, detail::State& ds, double t) {
                    std::vector<cplx> dr = constant ? d : drive_at(t, b);
                    const cplx f = detail::vector_field(lambda, dr, cplx{s[0], s[1]});
                    ds = {f.real(), f.imag()};
                };
                auto check = [&](const detail::State& s, double t) {
                    const cplx h{s[0], s[1]};
                    for (size_t k = 0; k < m; ++k)
                        if (lambda[k] > 0.0 && std::abs(h - (constant ? d[k] : xi[k](t))) < opts.absorption_threshold) {
                            tr.absorbed_at = t;
                            tr.absorbed_by = k;
                            return false;
                        }
                    return true;
                };
                alive = integrate_piece(x, a, b, rhs, check);
            }
            if (alive) tr.values.emplace_back(x[0], x[1]);
        }
        out.trajectories.push_back(std::move(tr));
    }
    return out;
}

}  // namespace loewner::evolution
