#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "loewner/extend.hpp"
#include "loewner/geometry.hpp"
#include "loewner/table.hpp"
#include "loewner/zipper.hpp"

namespace loewner {

/// Raised when a requested certificate lies below what the oracle resolves.
class AccuracyFloor : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    /// Target accuracy of lmr values; drives the zipper resolution.
    double accuracy = 1e-6;
    int min_resolution = 256;
    int max_resolution = 8192;
    /// Forces a resolution instead of running the convergence policy.
    std::optional<int> resolution;
    geometry::ExtendOptions extend;
};

/// The four partition sums of a pair (or m-tuple) of prefix tables.
struct PartitionSums {
    std::vector<double> s;        // s[j]: increments of slit j from the lower corner
    std::vector<double> s_tilde;  // s_tilde[j]: increments of slit j into the upper corner
    std::vector<double> partition;
    double norm = 0;

    double s1() const { return s.at(0); }
    double s2() const { return s.at(1); }
    double s1_tilde() const { return s_tilde.at(0); }
    double s2_tilde() const { return s_tilde.at(1); }
};

/// Logarithmic mapping radius of the disk minus prefixes of a fixed slit
/// system, as a function of the prefix fractions.
///
/// Slits are prolonged (by `extension_headroom` times the full-system lmr)
/// so fractions above 1 are addressable. Every evaluation unzips slits in
/// index order on one fixed arclength grid, which makes the value a
/// deterministic and continuous function of the fractions.
class LmrOracle {
public:
    explicit LmrOracle(SlitSystem system, OracleOptions opts = {}) : system_(std::move(system)), opts_(opts) {
        geometry::require_valid(system_);
        if (!(opts_.accuracy > 0.0)) throw std::invalid_argument("oracle accuracy must be positive");
        choose_resolution();
        extended_ = geometry::extend(system_, system_.extension_headroom * L_ * (1.0 + 1e-3) + 1e-9, opts_.extend);
        double total = 0.0;
        for (const auto& s : system_.slits) total += geometry::length(s);
        const double spacing = total / resolution_;
        for (size_t k = 0; k < system_.slits.size(); ++k)
            grids_.emplace_back(geometry::subdivide(extended_.slits[k].points, spacing),
                                geometry::length(system_.slits[k]));
        std::vector<double> ones(system_.slits.size(), 1.0);
        L_ = lmr_at(ones);
    }

    const SlitSystem& system() const { return system_; }
    const SlitSystem& extended() const { return extended_; }
    size_t slit_count() const { return grids_.size(); }
    int resolution() const { return resolution_; }
    double accuracy() const { return opts_.accuracy; }
    const OracleOptions& options() const { return opts_; }
    /// Logarithmic mapping radius of the full system.
    double L() const { return L_; }
    /// Convergence differences seen while choosing the resolution.
    const std::vector<std::pair<int, double>>& resolution_trace() const { return resolution_trace_; }
    double max_fraction(size_t k) const { return grids_[k].max_fraction(); }
    std::span<const zipper::GriddedSlit> grids() const { return grids_; }

    zipper::UnzipSession session() const { return zipper::UnzipSession(grids_); }

    double lmr_at(std::span<const double> fractions) const {
        if (fractions.size() != grids_.size()) throw std::invalid_argument("one fraction per slit required");
        auto key = make_key(fractions);
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        auto s = session();
        for (size_t k = 0; k < fractions.size(); ++k) s.advance(k, check(k, fractions[k]));
        store(std::move(key), s.lmr());
        return s.lmr();
    }

    double lmr_at(std::initializer_list<double> fractions) const {
        return lmr_at(std::span<const double>(fractions.begin(), fractions.size()));
    }

    /// lmr on the product grid {i/(n-1)}^2 of a two-slit system; row index
    /// is the first slit's fraction.
    std::vector<std::vector<double>> grid(int n) const {
        if (grids_.size() != 2) throw std::invalid_argument("grid() needs exactly two slits");
        std::vector<std::vector<double>> g(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i) {
            const double f1 = static_cast<double>(i) / (n - 1);
            auto s = session();
            s.advance(0, f1);
            zipper::SlitProbe probe(s, 1);
            for (int j = 0; j < n; ++j) {
                const double f2 = static_cast<double>(j) / (n - 1);
                g[i][j] = probe.lmr(f2);
                store(make_key(std::vector<double>{f1, f2}), g[i][j]);
            }
        }
        return g;
    }

    /// Partition sums for prefix tables `tables[j]` (time -> fraction of
    /// slit j) over the partition Z of [0, t].
    PartitionSums sums(std::span<const Table> tables, std::span<const double> Z) const {
        const size_t m = grids_.size();
        if (tables.size() != m) throw std::invalid_argument("one table per slit required");
        if (Z.size() < 2 || Z.front() != 0.0) throw std::invalid_argument("partition must start at 0");
        for (size_t i = 1; i < Z.size(); ++i)
            if (!(Z[i] > Z[i - 1])) throw std::invalid_argument("partition must be strictly increasing");
        PartitionSums out;
        out.s.assign(m, 0.0);
        out.s_tilde.assign(m, 0.0);
        out.partition.assign(Z.begin(), Z.end());
        std::vector<double> lo(m), hi(m), mixed(m);
        for (size_t l = 0; l + 1 < Z.size(); ++l) {
            out.norm = std::max(out.norm, Z[l + 1] - Z[l]);
            for (size_t j = 0; j < m; ++j) {
                lo[j] = tables[j](Z[l]);
                hi[j] = tables[j](Z[l + 1]);
            }
            const double at_lo = lmr_at(lo);
            const double at_hi = lmr_at(hi);
            for (size_t j = 0; j < m; ++j) {
                mixed = lo;
                mixed[j] = hi[j];
                out.s[j] += lmr_at(mixed) - at_lo;
                mixed = hi;
                mixed[j] = lo[j];
                out.s_tilde[j] += at_hi - lmr_at(mixed);
            }
        }
        return out;
    }

    /// Largest grid-certified delta: every difference-quotient ratio over
    /// quadruples of an n x n grid with both gaps at most delta lies in
    /// (1 - eps, 1 + eps).
    double continuity_modulus(double eps, int n = 33) const {
        if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
        const auto g = grid(n);
        const int cells = n - 1;
        for (int gap = cells; gap >= 1; --gap)
            if (worst_ratio_deviation(g, gap) < eps) return static_cast<double>(gap) / cells;
        throw AccuracyFloor("no delta above the grid spacing satisfies epsilon = " + std::to_string(eps));
    }

    /// max |ratio - 1| over grid quadruples with index gaps <= gap.
    static double worst_ratio_deviation(const std::vector<std::vector<double>>& g, int gap) {
        const int n = static_cast<int>(g.size());
        double worst = 0.0;
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = i1 + 1; i2 < n && i2 - i1 <= gap; ++i2)
                for (int j1 = 0; j1 < n; ++j1)
                    for (int j2 = j1 + 1; j2 < n && j2 - j1 <= gap; ++j2) {
                        const double num = g[i1][j1] - g[i2][j1];
                        const double den = g[i1][j2] - g[i2][j2];
                        worst = std::max(worst, std::abs(num / den - 1.0));
                    }
        return worst;
    }

private:
    using Key = std::vector<long long>;

    static Key make_key(std::span<const double> f) {
        Key key(f.size());
        for (size_t i = 0; i < f.size(); ++i) key[i] = std::llround(f[i] * 1e9);
        return key;
    }

    double check(size_t k, double f) const {
        if (!(f >= 0.0) || f > max_fraction(k) * (1.0 + 1e-12))
            throw std::invalid_argument("prefix fraction out of range for slit " + std::to_string(k));
        return f;
    }

    void store(Key key, double value) const {
        std::lock_guard lock(mutex_);
        cache_.insert_or_assign(std::move(key), value);
    }

    void choose_resolution() {
        if (opts_.resolution) {
            resolution_ = *opts_.resolution;
            L_ = zipper::map_disk_minus_slits(system_.slits, resolution_).lmr_value;
            return;
        }
        int r = opts_.min_resolution;
        double prev = zipper::map_disk_minus_slits(system_.slits, r).lmr_value;
        while (true) {
            const double next = zipper::map_disk_minus_slits(system_.slits, 2 * r).lmr_value;
            resolution_trace_.emplace_back(r, std::abs(next - prev));
            if (std::abs(next - prev) < opts_.accuracy || 2 * r >= opts_.max_resolution) {
                if (std::abs(next - prev) >= opts_.accuracy) r *= 2;
                resolution_ = r;
                L_ = r == resolution_trace_.back().first ? prev : next;
                return;
            }
            prev = next;
            r *= 2;
        }
    }

    SlitSystem system_;
    SlitSystem extended_;
    OracleOptions opts_;
    int resolution_ = 0;
    double L_ = 0;
    std::vector<std::pair<int, double>> resolution_trace_;
    std::vector<zipper::GriddedSlit> grids_;
    mutable std::mutex mutex_;
    mutable std::map<Key, double> cache_;
};

}  // namespace loewner
