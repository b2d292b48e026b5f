#pragma once

// Prolonging slits until each one alone reaches a prescribed logarithmic
// mapping radius.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "loewner/geometry.hpp"
#include "loewner/zipper.hpp"

namespace loewner::geometry {

struct ExtendOptions {
    double step_length = 0.02;
    /// Extra turn toward the origin per appended segment (radians). Zero keeps
    /// the straight continuation whenever it is admissible.
    double turn_per_step = 0.0;
    double origin_clearance = 0.04;
    double circle_clearance = 0.02;
    double slit_clearance = 0.02;
    int max_segments = 4000;
};

/// lmr of the disk minus one polyline slit.
inline double single_slit_lmr(std::span<const cplx> pts) {
    const Slit s{{pts.begin(), pts.end()}};
    const int resolution = std::max<int>(256, static_cast<int>(8 * pts.size()));
    return zipper::map_disk_minus_slits(std::span<const Slit>(&s, 1), resolution).lmr_value;
}

namespace detail {

inline std::string blocked_reason(cplx a, cplx b, const std::vector<std::vector<cplx>>& others,
                                  std::span<const cplx> own, const ExtendOptions& o) {
    if (distance_to_segment(cplx{0.0, 0.0}, a, b) < o.origin_clearance) return "the origin";
    if (std::abs(b) > 1.0 - o.circle_clearance) return "the unit circle";
    for (size_t k = 0; k < others.size(); ++k)
        if (polyline_distance(std::vector<cplx>{a, b}, others[k]) < o.slit_clearance)
            return "slit " + std::to_string(k);
    // the last stretch of the slit is adjacent to the new segment by construction
    const auto s = arclengths(own);
    const double keep = s.back() - 3.0 * o.slit_clearance;
    if (keep > 0.0) {
        const auto end = std::upper_bound(s.begin(), s.end(), keep) - s.begin();
        std::vector<cplx> head(own.begin(), own.begin() + end);
        head.push_back(point_at_arclength(own, s, keep));
        if (polyline_distance(std::vector<cplx>{a, b}, head) < o.slit_clearance) return "itself";
    }
    return {};
}

/// One slit unzipped point by point, so appending a segment only costs the
/// new pieces.
class GrowingSlit {
public:
    GrowingSlit(std::span<const cplx> pts, double spacing) : spacing_(spacing), base_(unit(pts.front())), last_(pts.front()) {
        for (size_t i = 1; i < pts.size(); ++i) append(pts[i]);
    }

    double lmr() const { return lmr_; }

    void append(cplx q) {
        for (const cplx p : pieces(q)) push(zipper::make_step(base_, map(p)));
        last_ = q;
    }

    /// lmr after appending q, without appending it.
    double trial(cplx q) const {
        std::vector<zipper::Step> extra;
        cplx base = base_;
        double lmr = lmr_;
        for (const cplx p : pieces(q)) {
            cplx z = map(p);
            for (const auto& st : extra) z = zipper::apply_interior(st, z);
            extra.push_back(zipper::make_step(base, z));
            base = zipper::step_tip_image(extra.back());
            lmr += extra.back().log_gain;
        }
        return lmr;
    }

private:
    std::vector<cplx> pieces(cplx q) const {
        if (std::abs(q - last_) < zipper::GriddedSlit::kSnap * spacing_) return {};
        const int n = std::max(1, static_cast<int>(std::ceil(std::abs(q - last_) / spacing_)));
        std::vector<cplx> out;
        for (int i = 1; i <= n; ++i) out.push_back(last_ + (static_cast<double>(i) / n) * (q - last_));
        return out;
    }

    cplx map(cplx z) const {
        for (const auto& st : steps_) z = zipper::apply_interior(st, z);
        return z;
    }

    void push(const zipper::Step& st) {
        steps_.push_back(st);
        base_ = zipper::step_tip_image(st);
        lmr_ += st.log_gain;
    }

    double spacing_;
    cplx base_;
    cplx last_;
    double lmr_ = 0;
    std::vector<zipper::Step> steps_;
};

}  // namespace detail

/// Prolongs every slit (continuing its last direction, turning as little as
/// needed to keep clear of the origin, the circle and the other slits) until
/// each slit alone has lmr >= target_lmr. Original points stay a prefix.
inline SlitSystem extend(const SlitSystem& system, double target_lmr, const ExtendOptions& opts = {}) {
    require_valid(system);
    SlitSystem out = system;
    std::vector<std::vector<cplx>> done;
    for (const auto& s : system.slits) done.push_back(s.points);
    for (size_t k = 0; k < out.slits.size(); ++k) {
        auto& pts = out.slits[k].points;
        cplx dir = unit(pts.back() - pts[pts.size() - 2]);
        std::vector<std::vector<cplx>> others;
        for (size_t j = 0; j < done.size(); ++j)
            if (j != k) others.push_back(done[j]);
        const double spacing = std::min(opts.step_length / 8.0, length(out.slits[k]) / 256.0);
        detail::GrowingSlit grow(pts, spacing);
        int segments = 0;
        while (grow.lmr() < target_lmr) {
            if (++segments > opts.max_segments)
                throw GeometricConflict("extension of slit " + std::to_string(k) + " did not reach the target lmr");
            const cplx tip = pts.back();
            // bend toward the origin
            const double side = (std::conj(dir) * -tip).imag() >= 0.0 ? 1.0 : -1.0;
            dir *= std::polar(1.0, side * opts.turn_per_step);
            std::string reason;
            std::optional<cplx> next;
            constexpr double kTurn = std::numbers::pi / 12.0;
            for (int attempt = 0; attempt <= 12 && !next; ++attempt) {
                const int sign = attempt % 2 == 1 ? 1 : -1;
                const double angle = sign * ((attempt + 1) / 2) * kTurn;
                const cplx d = dir * std::polar(1.0, angle);
                const cplx candidate = tip + opts.step_length * d;
                const std::string why = detail::blocked_reason(tip, candidate, others, pts, opts);
                if (why.empty()) {
                    next = candidate;
                    dir = d;
                } else if (attempt == 0) {
                    reason = why;
                }
            }
            if (!next) throw GeometricConflict("extension of slit " + std::to_string(k) + " is blocked by " + reason);
            if (grow.trial(*next) >= target_lmr) {
                // shorten the final segment so the target is met, not overshot
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 40; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (grow.trial(tip + mid * (*next - tip)) >= target_lmr ? hi : lo) = mid;
                }
                next = tip + hi * (*next - tip);
            }
            pts.push_back(*next);
            grow.append(*next);
        }
        done[k] = pts;
    }
    return out;
}

}  // namespace loewner::geometry
