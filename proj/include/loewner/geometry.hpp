#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "loewner/core.hpp"

namespace loewner {

/// A slit as an ordered polyline: the first point sits on the unit circle,
/// every later point strictly inside the punctured disk.
struct Slit {
    std::vector<cplx> points;

    bool operator==(const Slit&) const = default;
};

/// m disjoint slits plus the margin factor used when slits get prolonged.
struct SlitSystem {
    std::vector<Slit> slits;
    double extension_headroom = 1.5;

    bool operator==(const SlitSystem&) const = default;
};

namespace geometry {

inline constexpr double kCircleTolerance = 1e-12;
inline constexpr double kTouchTolerance = 1e-9;

inline double distance_to_segment(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    const double s = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return false;
}

inline double segment_distance(cplx a, cplx b, cplx c, cplx d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({distance_to_segment(a, c, d), distance_to_segment(b, c, d),
                     distance_to_segment(c, a, b), distance_to_segment(d, a, b)});
}

inline double polyline_distance(std::span<const cplx> p, std::span<const cplx> q) {
    double best = std::numeric_limits<double>::infinity();
    if (p.size() == 1 && q.size() == 1) return std::abs(p[0] - q[0]);
    if (p.size() == 1) {
        for (size_t j = 0; j + 1 < q.size(); ++j)
            best = std::min(best, distance_to_segment(p[0], q[j], q[j + 1]));
        return best;
    }
    if (q.size() == 1) return polyline_distance(q, p);
    for (size_t i = 0; i + 1 < p.size(); ++i)
        for (size_t j = 0; j + 1 < q.size(); ++j)
            best = std::min(best, segment_distance(p[i], p[i + 1], q[j], q[j + 1]));
    return best;
}

inline double length(const Slit& s) {
    double total = 0.0;
    for (size_t i = 1; i < s.points.size(); ++i) total += std::abs(s.points[i] - s.points[i - 1]);
    return total;
}

/// Cumulative arclength at each vertex.
inline std::vector<double> arclengths(std::span<const cplx> pts) {
    std::vector<double> s(pts.size(), 0.0);
    for (size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + std::abs(pts[i] - pts[i - 1]);
    return s;
}

/// Point at arclength `target` along a polyline with cumulative arclengths `s`.
inline cplx point_at_arclength(std::span<const cplx> pts, std::span<const double> s, double target) {
    if (target <= 0.0) return pts.front();
    if (target >= s.back()) return pts.back();
    const auto it = std::upper_bound(s.begin(), s.end(), target);
    const size_t hi = static_cast<size_t>(it - s.begin());
    const size_t lo = hi - 1;
    const double seg = s[hi] - s[lo];
    const double w = seg > 0.0 ? (target - s[lo]) / seg : 0.0;
    return pts[lo] + w * (pts[hi] - pts[lo]);
}

/// Sub-polyline covering the given fraction of normalized arclength; the
/// final point is interpolated. fraction = 1 returns the slit unchanged.
inline Slit prefix_points(const Slit& slit, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("prefix fraction must lie in [0,1], got " + std::to_string(fraction));
    if (slit.points.empty()) throw std::invalid_argument("empty slit");
    if (fraction == 1.0) return slit;
    const auto s = arclengths(slit.points);
    const double target = fraction * s.back();
    Slit out;
    out.points.push_back(slit.points.front());
    for (size_t i = 1; i < slit.points.size() && s[i] < target; ++i) out.points.push_back(slit.points[i]);
    if (target > 0.0) out.points.push_back(point_at_arclength(slit.points, s, target));
    return out;
}

/// Subdivides every segment uniformly so no piece is longer than `spacing`.
/// Original vertices are kept.
inline std::vector<cplx> subdivide(std::span<const cplx> pts, double spacing) {
    std::vector<cplx> out;
    if (pts.empty()) return out;
    out.push_back(pts.front());
    for (size_t i = 1; i < pts.size(); ++i) {
        const double len = std::abs(pts[i] - pts[i - 1]);
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
        for (int k = 1; k < pieces; ++k)
            out.push_back(pts[i - 1] + (static_cast<double>(k) / pieces) * (pts[i] - pts[i - 1]));
        out.push_back(pts[i]);
    }
    return out;
}

/// Returns the list of violated invariants; empty iff the system is admissible.
inline std::vector<std::string> validate(const SlitSystem& system) {
    std::vector<std::string> issues;
    if (system.slits.empty()) issues.push_back("system has no slits");
    if (!(system.extension_headroom > 0.0) || !std::isfinite(system.extension_headroom))
        issues.push_back("extension_headroom must be positive");
    for (size_t k = 0; k < system.slits.size(); ++k) {
        const auto& pts = system.slits[k].points;
        const std::string tag = "slit " + std::to_string(k) + ": ";
        if (pts.size() < 2) {
            issues.push_back(tag + "needs at least 2 points");
            continue;
        }
        bool finite = true;
        for (const auto& p : pts) finite = finite && std::isfinite(p.real()) && std::isfinite(p.imag());
        if (!finite) {
            issues.push_back(tag + "non-finite coordinate");
            continue;
        }
        if (std::abs(std::abs(pts.front()) - 1.0) > kCircleTolerance)
            issues.push_back(tag + "base point not on the unit circle");
        for (size_t i = 1; i < pts.size(); ++i) {
            const double r = std::abs(pts[i]);
            if (!(r > 0.0 && r < 1.0)) {
                issues.push_back(tag + "point " + std::to_string(i) + " not strictly inside the punctured disk");
                break;
            }
        }
        for (size_t i = 1; i < pts.size(); ++i)
            if (pts[i] == pts[i - 1]) {
                issues.push_back(tag + "repeated consecutive point");
                break;
            }
        for (size_t i = 0; i + 1 < pts.size(); ++i)
            if (distance_to_segment(cplx{0.0, 0.0}, pts[i], pts[i + 1]) < kTouchTolerance) {
                issues.push_back(tag + "passes through the origin");
                break;
            }
        bool simple = true;
        for (size_t i = 0; i + 1 < pts.size() && simple; ++i)
            for (size_t j = i + 2; j + 1 < pts.size() && simple; ++j)
                if (segment_distance(pts[i], pts[i + 1], pts[j], pts[j + 1]) < kTouchTolerance) simple = false;
        // adjacent segments folding back onto each other
        for (size_t i = 1; i + 1 < pts.size() && simple; ++i) {
            const cplx u = pts[i] - pts[i - 1], v = pts[i + 1] - pts[i];
            if (std::abs(cross(u, v)) <= 1e-15 * std::abs(u) * std::abs(v) && (u * std::conj(v)).real() < 0)
                simple = false;
        }
        if (!simple) issues.push_back(tag + "polyline is not simple");
    }
    for (size_t a = 0; a < system.slits.size(); ++a)
        for (size_t b = a + 1; b < system.slits.size(); ++b) {
            const auto& p = system.slits[a].points;
            const auto& q = system.slits[b].points;
            if (p.empty() || q.empty()) continue;
            if (std::abs(p.front() - q.front()) < kTouchTolerance)
                issues.push_back("slits " + std::to_string(a) + " and " + std::to_string(b) + " share a base point");
            else if (polyline_distance(p, q) < kTouchTolerance)
                issues.push_back("slits " + std::to_string(a) + " and " + std::to_string(b) + " are not disjoint");
        }
    return issues;
}

inline void require_valid(const SlitSystem& system) {
    const auto issues = validate(system);
    if (!issues.empty()) throw std::invalid_argument("invalid slit system: " + issues.front());
}

/// One-sided discrete Hausdorff distance from polyline p to polyline q,
/// sampling p at spacing no coarser than `sample`.
inline double directed_hausdorff(std::span<const cplx> p, std::span<const cplx> q, double sample) {
    const auto dense = subdivide(p, sample);
    double worst = 0.0;
    for (const cplx& x : dense) {
        double best = std::numeric_limits<double>::infinity();
        if (q.size() == 1) best = std::abs(x - q[0]);
        for (size_t j = 0; j + 1 < q.size(); ++j) best = std::min(best, distance_to_segment(x, q[j], q[j + 1]));
        worst = std::max(worst, best);
    }
    return worst;
}

inline double hausdorff(std::span<const cplx> p, std::span<const cplx> q, double sample = 1e-3) {
    return std::max(directed_hausdorff(p, q, sample), directed_hausdorff(q, p, sample));
}

}  // namespace geometry
}  // namespace loewner
