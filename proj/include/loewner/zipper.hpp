#pragma once

// Geodesic zipper for the unit disk minus finitely many slits.
//
// Each elementary step removes one short piece of a slit. In half-plane
// coordinates w = i(zeta - z)/(zeta + z), which send the current base zeta of
// the slit to 0 and the origin to i, the piece ends at a point a in the upper
// half-plane. The circular arc through 0 and a orthogonal to the real axis is
// straightened by w -> w/(1 - w Re(a)/|a|^2) onto the segment [0, id] with
// d = |a|^2/Im(a), and w -> sqrt(w^2 + d^2) opens that segment onto the real
// axis. A disk automorphism then sends the image of i back to the origin and
// rotates so the derivative at the origin is positive. The logarithm of that
// derivative is accumulated exactly, so the logarithmic mapping radius is a
// sum of per-step gains with no finite differencing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "loewner/core.hpp"
#include "loewner/geometry.hpp"

namespace loewner::zipper {

/// One elementary unzip map.
struct Step {
    cplx zeta;        // base point on the circle, current coordinates
    double cinv = 0;  // Re(a)/|a|^2
    double d = 0;     // |a|^2/Im(a)
    cplx w0;          // image of the origin's half-plane point i
    cplx rot;         // unimodular post-rotation
    double log_gain = 0;
    int slit = -1;
};

namespace detail {

inline cplx to_half_plane(cplx zeta, cplx z) { return I * (zeta - z) / (zeta + z); }

inline cplx straighten(const Step& st, cplx w) { return w / (1.0 - w * st.cinv); }

// sqrt onto the upper half-plane, cut along [0, inf).
inline cplx sqrt_upper(cplx u) { return I * std::sqrt(-u); }

inline cplx to_disk(const Step& st, cplx w) { return st.rot * (w - st.w0) / (w - std::conj(st.w0)); }

}  // namespace detail

/// Builds the step that unzips the piece from `zeta` (on the circle) to `p`
/// (inside the disk), both in current coordinates.
inline Step make_step(cplx zeta, cplx p, int slit = -1) {
    const cplx a = detail::to_half_plane(zeta, p);
    if (!(a.imag() > 0.0) || !std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw GeometricConflict("unzip point left the working domain");
    Step st;
    st.zeta = zeta;
    st.slit = slit;
    const double n = std::norm(a);
    st.cinv = a.real() / n;
    st.d = n / a.imag();
    const cplx s = detail::straighten(st, I);
    const cplx phi = detail::sqrt_upper(s * s + st.d * st.d);
    const cplx ds = 1.0 / ((1.0 - I * st.cinv) * (1.0 - I * st.cinv));
    const cplx dphi = s * ds / phi;
    st.w0 = phi;
    // derivative at the origin of disk->half-plane->phi->disk before rotation
    const cplx total = -dphi / (zeta * phi.imag());
    st.rot = std::conj(unit(total));
    st.log_gain = std::log(std::abs(dphi)) - std::log(phi.imag());
    return st;
}

/// Image of an interior point under one step.
inline cplx apply_interior(const Step& st, cplx z) {
    const cplx w = detail::to_half_plane(st.zeta, z);
    const cplx s = detail::straighten(st, w);
    const cplx phi = detail::sqrt_upper(s * s + st.d * st.d);
    return detail::to_disk(st, phi);
}

/// Image of a point of the unit circle (other than the step's own base).
inline cplx apply_boundary(const Step& st, cplx z) {
    if (std::abs(z + st.zeta) < 1e-15) {
        // w = infinity
        const double s = -1.0 / st.cinv;
        if (!std::isfinite(s)) return st.rot;
        const double phi = std::copysign(std::sqrt(s * s + st.d * st.d), s);
        return unit(detail::to_disk(st, cplx{phi, 0.0}));
    }
    const double w = detail::to_half_plane(st.zeta, z).real();
    const double den = 1.0 - w * st.cinv;
    if (std::abs(den) < 1e-300) return st.rot;
    const double s = w / den;
    const double phi = std::copysign(std::sqrt(s * s + st.d * st.d), s);
    return unit(detail::to_disk(st, cplx{phi, 0.0}));
}

/// Image of the piece's endpoint: it lands on the circle where the next
/// piece of the same slit starts.
inline cplx step_tip_image(const Step& st) { return unit(st.rot * st.w0 / std::conj(st.w0)); }

/// A slit resampled on a fixed arclength grid. Fractions are measured against
/// `reference_length`, which may be shorter than the polyline when the slit
/// has been prolonged; fractions above 1 then address the prolongation.
struct GriddedSlit {
    std::vector<cplx> points;
    std::vector<double> s;
    double reference_length = 0;

    GriddedSlit() = default;
    GriddedSlit(std::vector<cplx> pts, double ref) : points(std::move(pts)), s(geometry::arclengths(points)), reference_length(ref) {}

    double max_fraction() const { return s.back() / reference_length; }
    cplx at_fraction(double f) const { return geometry::point_at_arclength(points, s, f * reference_length); }
    /// Grid point i lies inside the prefix ending at arclength `target`
    /// (snapping targets that miss a grid point by rounding only).
    bool covers(size_t i, double target) const { return s[i] <= target + kSnap * reference_length; }

    static constexpr double kSnap = 1e-12;
};

class SlitProbe;

/// Incremental unzipping of several gridded slits. Advancing a slit commits
/// every grid point up to the requested fraction, then the interpolated tip.
/// The value after a given sequence of advances is bit-reproducible, and a
/// `SlitProbe` predicts the value of a single advance without committing.
class UnzipSession {
public:
    explicit UnzipSession(std::span<const GriddedSlit> slits) : slits_(slits.begin(), slits.end()) {
        state_.resize(slits_.size());
        for (size_t k = 0; k < slits_.size(); ++k) {
            auto& st = state_[k];
            st.base = unit(slits_[k].points.front());
            st.images.assign(slits_[k].points.begin(), slits_[k].points.end());
            st.mapped.assign(st.images.size(), 0);
            st.next = 1;
        }
    }

    size_t slit_count() const { return slits_.size(); }
    double lmr() const { return lmr_; }
    double fraction(size_t k) const { return state_[k].fraction; }
    /// Current image of slit k's tip (its base point while the prefix is empty).
    cplx tip_image(size_t k) const { return state_[k].base; }
    std::span<const Step> steps() const { return steps_; }
    const GriddedSlit& slit(size_t k) const { return slits_[k]; }

    /// Maps an interior point of the original domain to current coordinates.
    cplx map_point(cplx z) const {
        for (const auto& st : steps_) z = apply_interior(st, z);
        return z;
    }

    void advance(size_t k, double f) {
        auto& st = state_[k];
        if (f < st.fraction) throw std::invalid_argument("slits can only be advanced forward");
        if (f > slits_[k].max_fraction() * (1.0 + 1e-12))
            throw BracketFailure("requested prefix beyond the prolonged slit");
        const double target = f * slits_[k].reference_length;
        const auto& grid = slits_[k];
        while (st.next < grid.points.size() && grid.covers(st.next, target)) {
            const cplx p = image(k, st.next);
            st.consumed_s = grid.s[st.next];
            ++st.next;
            commit(k, p);
        }
        if (target - st.consumed_s > GriddedSlit::kSnap * grid.reference_length) {
            const cplx p = map_point(grid.at_fraction(f));
            st.consumed_s = target;
            commit(k, p);
        }
        st.fraction = f;
    }

private:
    friend class SlitProbe;

    struct SlitState {
        cplx base;
        // images of grid points, brought up to date lazily: images[i] has
        // been mapped through the first mapped[i] steps
        std::vector<cplx> images;
        std::vector<size_t> mapped;
        size_t next = 1;
        double consumed_s = 0;
        double fraction = 0;
    };

    /// Current image of grid point i of slit k.
    cplx image(size_t k, size_t i) const {
        auto& st = state_[k];
        for (; st.mapped[i] < steps_.size(); ++st.mapped[i]) st.images[i] = apply_interior(steps_[st.mapped[i]], st.images[i]);
        return st.images[i];
    }

    void commit(size_t k, cplx p) {
        const Step step = make_step(state_[k].base, p, static_cast<int>(k));
        for (size_t j = 0; j < state_.size(); ++j)
            if (j != k) state_[j].base = apply_boundary(step, state_[j].base);
        state_[k].base = step_tip_image(step);
        lmr_ += step.log_gain;
        steps_.push_back(step);
        for (size_t j = 0; j < state_.size(); ++j) {
            const auto& st = state_[j];
            if (st.next >= st.images.size()) continue;
            const cplx z = image(j, st.next);
            if (!(std::norm(z) < 1.0) || !std::isfinite(z.real()))
                throw GeometricConflict("slit " + std::to_string(j) + " point " + std::to_string(st.next) +
                                        " was swallowed while unzipping slit " + std::to_string(k));
            if (j != k && std::abs(z - state_[k].base) < geometry::kTouchTolerance)
                throw GeometricConflict("slits " + std::to_string(j) + " and " + std::to_string(k) + " nearly touch");
        }
    }

    std::vector<GriddedSlit> slits_;
    mutable std::vector<SlitState> state_;
    std::vector<Step> steps_;
    double lmr_ = 0;
};

/// Evaluates "advance slit k to fraction f" against a fixed session without
/// committing. Trial steps for grid points are built lazily and reused, so a
/// root finder pays O(committed steps) per probe. Values are bit-identical to
/// what `advance` would produce.
class SlitProbe {
public:
    SlitProbe(const UnzipSession& session, size_t k) : session_(session), k_(k) {
        const auto& st = session_.state_[k];
        base_ = st.base;
        trial_lmr_.push_back(session_.lmr_);
        trial_base_.push_back(base_);
        trial_s_.push_back(st.consumed_s);
    }

    struct Value {
        double lmr;
        cplx tip;
    };

    Value evaluate(double f) {
        const auto& grid = session_.slits_[k_];
        const auto& st = session_.state_[k_];
        if (f < st.fraction) throw std::invalid_argument("probe behind the committed prefix");
        if (f > grid.max_fraction() * (1.0 + 1e-12)) throw BracketFailure("probe beyond the prolonged slit");
        const double target = f * grid.reference_length;
        // trial steps for all grid points up to target
        size_t count = 0;
        while (st.next + count < grid.points.size() && grid.covers(st.next + count, target)) {
            ++count;
            extend_to(count);
        }
        double lmr = trial_lmr_[count];
        cplx tip = trial_base_[count];
        if (target - trial_s_[count] > GriddedSlit::kSnap * grid.reference_length) {
            cplx p = session_.map_point(grid.at_fraction(f));
            for (size_t i = 0; i < count; ++i) p = apply_interior(trial_[i], p);
            const Step step = make_step(trial_base_[count], p, static_cast<int>(k_));
            lmr += step.log_gain;
            tip = step_tip_image(step);
        }
        return {lmr, tip};
    }

    double lmr(double f) { return evaluate(f).lmr; }

    /// Largest admissible fraction for this slit.
    double max_fraction() const { return session_.slits_[k_].max_fraction(); }

private:
    void extend_to(size_t count) {
        while (trial_.size() < count) {
            const auto& st = session_.state_[k_];
            const size_t idx = st.next + trial_.size();
            cplx p = session_.image(k_, idx);
            for (const auto& t : trial_) p = apply_interior(t, p);
            const Step step = make_step(trial_base_.back(), p, static_cast<int>(k_));
            trial_.push_back(step);
            trial_lmr_.push_back(trial_lmr_.back() + step.log_gain);
            trial_base_.push_back(step_tip_image(step));
            trial_s_.push_back(session_.slits_[k_].s[idx]);
        }
    }

    const UnzipSession& session_;
    size_t k_;
    cplx base_;
    std::vector<Step> trial_;
    std::vector<double> trial_lmr_;
    std::vector<cplx> trial_base_;
    std::vector<double> trial_s_;
};

/// Normalized map of the disk minus partial slits onto the disk.
struct MappingResult {
    double lmr_value = 0;
    std::vector<std::optional<cplx>> tip_images;
    std::vector<Step> steps;
    int resolution = 0;
    bool accuracy_warning = false;

    cplx evaluate(cplx z) const {
        for (const auto& st : steps) z = apply_interior(st, z);
        return z;
    }
};

/// Maps the disk minus the given prefixes (polylines starting on the circle;
/// a single point means an empty prefix). Segments are subdivided so that
/// about `resolution` pieces cover all prefixes together.
inline MappingResult map_disk_minus_slits(std::span<const Slit> prefixes, int resolution) {
    if (resolution < 1) throw std::invalid_argument("resolution must be positive");
    double total = 0.0;
    size_t input_points = 0;
    for (const auto& p : prefixes) {
        if (p.points.empty()) throw std::invalid_argument("prefix without base point");
        total += geometry::length(p);
        input_points += p.points.size();
    }
    for (size_t j = 0; j < prefixes.size(); ++j)
        for (size_t k = j + 1; k < prefixes.size(); ++k)
            if (geometry::polyline_distance(prefixes[j].points, prefixes[k].points) < geometry::kTouchTolerance)
                throw GeometricConflict("slits " + std::to_string(j) + " and " + std::to_string(k) + " nearly touch");
    MappingResult result;
    result.resolution = resolution;
    result.accuracy_warning = static_cast<size_t>(resolution) < input_points;
    result.tip_images.resize(prefixes.size());
    if (total == 0.0) return result;
    const double spacing = total / resolution;
    std::vector<GriddedSlit> grids;
    grids.reserve(prefixes.size());
    for (const auto& p : prefixes) {
        const double len = geometry::length(p);
        grids.emplace_back(geometry::subdivide(p.points, spacing), len > 0.0 ? len : 1.0);
    }
    UnzipSession session(grids);
    for (size_t k = 0; k < prefixes.size(); ++k)
        if (geometry::length(prefixes[k]) > 0.0) session.advance(k, 1.0);
    result.lmr_value = session.lmr();
    for (size_t k = 0; k < prefixes.size(); ++k)
        if (geometry::length(prefixes[k]) > 0.0) result.tip_images[k] = session.tip_image(k);
    result.steps.assign(session.steps().begin(), session.steps().end());
    return result;
}

/// Canonical domain description. Only the disk itself (no circular arcs) is
/// supported.
struct KernelSpec {
    int connectivity = 0;
};

/// Herglotz kernel (u + w)/(u - w) of the radial equation in the disk.
inline cplx kernel(cplx u, cplx w, const KernelSpec& spec = {}) {
    if (spec.connectivity != 0)
        throw UnsupportedConnectivity("kernel for circular slit disks with arcs is not implemented");
    if (std::abs(std::abs(u) - 1.0) > 1e-12) throw std::invalid_argument("kernel: u must be unimodular");
    if (std::abs(w - u) < 1e-15) throw std::domain_error("kernel: pole at w = u");
    if (!(std::abs(w) < 1.0)) throw std::invalid_argument("kernel: w must lie in the open disk");
    return (u + w) / (u - w);
}

/// Diagnostic dump: one row per unzip step with its parameters.
inline void write_steps_csv(std::ostream& os, std::span<const Step> steps) {
    os << "step,slit,zeta_re,zeta_im,cinv,d,w0_re,w0_im,rot_re,rot_im,running_lmr\n";
    os.precision(17);
    double running = 0.0;
    for (size_t i = 0; i < steps.size(); ++i) {
        const auto& st = steps[i];
        running += st.log_gain;
        os << i << ',' << st.slit << ',' << st.zeta.real() << ',' << st.zeta.imag() << ',' << st.cinv << ','
           << st.d << ',' << st.w0.real() << ',' << st.w0.imag() << ',' << st.rot.real() << ',' << st.rot.imag()
           << ',' << running << '\n';
    }
}

}  // namespace loewner::zipper
