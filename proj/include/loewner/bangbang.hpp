#pragma once

// Constant-coefficient construction. At level n the slits advance in n
// rounds; in each round slit j grows until the total lmr has gained
// lambda_j * L / n. The weights lambda are tuned so every slit is exhausted
// exactly at the last round, and refinement of n drives them to the unique
// constant coefficients.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loewner/lmr_oracle.hpp"
#include "loewner/table.hpp"
#include "loewner/zipper.hpp"

namespace loewner::bangbang {

struct Options {
    /// Inner root-find tolerance in lmr units.
    double root_tolerance = 1e-8;
    /// Outer solve stops when the lambda bracket is this narrow.
    double lambda_resolution = 1e-11;
    double lambda_tolerance = 1e-3;
    double table_tolerance = 1e-3;
    /// Levels run over base^min_level ... base^max_level.
    int base = 2;
    int min_level = 1;
    int max_level = 6;
    bool stop_early = true;
    int outer_iteration_cap = 100;
};

/// One level of the construction.
struct PartitionLevel {
    int n = 0;
    std::vector<double> lambda;
    /// fractions[j][k]: prefix fraction of slit j after round k (k = 0..n).
    std::vector<std::vector<double>> fractions;
    /// driving points after each round, xi[j][k].
    std::vector<std::vector<cplx>> xi;
    /// lmr after each sub-step, in order (round 1 slit 1, round 1 slit 2, ...).
    std::vector<double> lmr_trace;
    double residual = 0;
};

struct LevelRecord {
    int n = 0;
    std::vector<double> lambda;
    double residual = 0;
    double lambda_change = std::nan("");
    double table_change = std::nan("");
};

struct ConstantCoeffSolution {
    std::vector<double> lambda;
    double L = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> u;   // u[j][i]: fraction of slit j at times[i]
    std::vector<std::vector<cplx>> xi;    // xi[j][i]
    std::vector<LevelRecord> levels;
    bool converged = false;
    int resolution = 0;

    size_t slit_count() const { return lambda.size(); }
    Table u_table(size_t j) const { return Table{times, u[j]}; }
    DrivingTable xi_table(size_t j) const { return DrivingTable{times, xi[j], DrivingTable::Interp::Linear}; }
};

/// L = lmr of the full system.
inline double compute_L(const LmrOracle& oracle) {
    std::vector<double> ones(oracle.slit_count(), 1.0);
    return oracle.lmr_at(ones);
}

namespace detail {

struct Exhausted {
    size_t slit;
};

/// Grows slit j in `session` until its lmr reaches `target`. Returns the
/// fraction, or nullopt when even the whole prolonged slit falls short.
inline std::optional<double> grow_to(zipper::UnzipSession& session, size_t j, double target, double tol) {
    zipper::SlitProbe probe(session, j);
    double lo = session.fraction(j);
    const double top = probe.max_fraction();
    if (session.lmr() >= target - tol) return lo;
    // expanding bracket: probes far beyond the root would unzip the whole
    // prolongation
    double hi = lo;
    for (double step = 1.0 / 64.0;; step *= 2.0) {
        hi = std::min(lo + step, top);
        if (probe.lmr(hi) >= target - tol) break;
        if (hi == top) return std::nullopt;
        lo = hi;
    }
    double f = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = probe.lmr(mid);
        f = mid;
        if (std::abs(v - target) <= tol) break;
        (v < target ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) {
            f = hi;
            break;
        }
    }
    session.advance(j, f);
    return f;
}

/// Runs one level; returns the slit that ran out of length if any.
inline std::variant<PartitionLevel, Exhausted> run_level(const LmrOracle& oracle, int n, std::span<const double> lambda,
                                                         const Options& opts) {
    const size_t m = oracle.slit_count();
    const double L = oracle.L();
    PartitionLevel level;
    level.n = n;
    level.lambda.assign(lambda.begin(), lambda.end());
    level.fractions.assign(m, std::vector<double>(1, 0.0));
    auto session = oracle.session();
    level.xi.resize(m);
    for (size_t j = 0; j < m; ++j) level.xi[j].push_back(session.tip_image(j));
    double cumulative = 0.0;
    for (int k = 1; k <= n; ++k) {
        for (size_t j = 0; j < m; ++j) {
            cumulative += lambda[j];
            // anchored targets keep root-find errors from accumulating
            const double target = (static_cast<double>(k - 1) + cumulative) * L / n;
            const auto f = grow_to(session, j, target, opts.root_tolerance);
            if (!f) return Exhausted{j};
            level.fractions[j].push_back(*f);
            level.lmr_trace.push_back(session.lmr());
        }
        cumulative = 0.0;
        for (size_t j = 0; j < m; ++j) level.xi[j].push_back(session.tip_image(j));
    }
    level.residual = std::abs(session.lmr() - L);
    return level;
}

}  // namespace detail

/// Builds level n for the given weights. Throws BracketFailure when some
/// slit would need more length than its prolongation provides.
inline PartitionLevel build_level(const LmrOracle& oracle, int n, std::span<const double> lambda,
                                  const Options& opts = {}) {
    if (n < 1) throw std::invalid_argument("level needs n >= 1");
    if (lambda.size() != oracle.slit_count()) throw std::invalid_argument("one weight per slit required");
    const double sum = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    for (double l : lambda)
        if (!(l >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
    auto r = detail::run_level(oracle, n, lambda, opts);
    if (auto* e = std::get_if<detail::Exhausted>(&r))
        throw BracketFailure("slit " + std::to_string(e->slit) + " ran out of length; increase the extension headroom");
    return std::get<PartitionLevel>(std::move(r));
}

/// Finds weights for which every slit is exhausted exactly at round n and
/// returns the corresponding level.
inline PartitionLevel solve_lambda(const LmrOracle& oracle, int n, const Options& opts = {}) {
    const size_t m = oracle.slit_count();
    if (m == 1) return build_level(oracle, n, std::vector<double>{1.0}, opts);

    // signed miss of slit j's final fraction; exhaustion counts as +/- inf
    auto miss = [&](const std::vector<double>& lambda, size_t j) -> double {
        auto r = detail::run_level(oracle, n, lambda, opts);
        if (auto* e = std::get_if<detail::Exhausted>(&r)) return e->slit == j ? 1e300 : -1e300;
        return std::get<PartitionLevel>(r).fractions[j].back() - 1.0;
    };
    auto complete = [&](std::vector<double>& lambda) {
        double rest = 1.0;
        for (size_t i = 0; i + 1 < m; ++i) rest -= lambda[i];
        lambda[m - 1] = rest;
    };
    auto bisect = [&](std::vector<double>& lambda, size_t j) {
        double others = 0.0;
        for (size_t i = 0; i + 1 < m; ++i)
            if (i != j) others += lambda[i];
        double lo = 0.0, hi = 1.0 - others;
        while (hi - lo > opts.lambda_resolution) {
            lambda[j] = 0.5 * (lo + hi);
            complete(lambda);
            (miss(lambda, j) > 0.0 ? hi : lo) = lambda[j];
        }
        lambda[j] = 0.5 * (lo + hi);
        complete(lambda);
    };

    std::vector<double> lambda(m, 1.0 / static_cast<double>(m));
    complete(lambda);
    if (m == 2) {
        bisect(lambda, 0);
    } else {
        std::vector<double> history;
        bool done = false;
        for (int sweep = 0; sweep < opts.outer_iteration_cap && !done; ++sweep) {
            for (size_t j = 0; j + 1 < m; ++j) bisect(lambda, j);
            double worst = 0.0;
            for (size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(miss(lambda, j)));
            history.push_back(worst);
            done = worst < 100.0 * opts.root_tolerance;
        }
        if (!done) {
            std::string trail;
            for (double h : history) {
                char buf[32];
                std::snprintf(buf, sizeof buf, " %.3g", h);
                trail += buf;
            }
            throw NonConvergence("coordinatewise weight solve did not converge; residuals:" + trail);
        }
    }
    return build_level(oracle, n, lambda, opts);
}

/// Multi-level construction with Cauchy-style stopping.
inline ConstantCoeffSolution construct(const LmrOracle& oracle, const Options& opts = {}) {
    if (opts.base < 2 || opts.min_level < 0 || opts.max_level < opts.min_level)
        throw std::invalid_argument("invalid level schedule");
    const size_t m = oracle.slit_count();
    ConstantCoeffSolution sol;
    sol.L = oracle.L();
    sol.resolution = oracle.resolution();
    std::optional<PartitionLevel> prev;
    std::optional<PartitionLevel> last;
    for (int j = opts.min_level; j <= opts.max_level; ++j) {
        int n = 1;
        for (int p = 0; p < j; ++p) n *= opts.base;
        PartitionLevel level = solve_lambda(oracle, n, opts);
        LevelRecord rec{n, level.lambda, level.residual};
        if (prev) {
            double dl = 0.0, dt = 0.0;
            for (size_t s = 0; s < m; ++s) {
                dl = std::max(dl, std::abs(level.lambda[s] - prev->lambda[s]));
                // compare on the coarser grid, which is nested in the finer one
                const int ratio = level.n / prev->n;
                for (int k = 0; k <= prev->n; ++k)
                    dt = std::max(dt, std::abs(level.fractions[s][k * ratio] - prev->fractions[s][k]));
            }
            rec.lambda_change = dl;
            rec.table_change = dt;
        }
        sol.levels.push_back(rec);
        prev = level;
        last = std::move(level);
        if (rec.lambda_change < opts.lambda_tolerance && rec.table_change < opts.table_tolerance) {
            sol.converged = true;
            if (opts.stop_early) break;
        } else {
            sol.converged = false;
        }
    }
    sol.lambda = last->lambda;
    for (int k = 0; k <= last->n; ++k) sol.times.push_back(sol.L * k / last->n);
    sol.u = last->fractions;
    sol.xi = last->xi;
    return sol;
}

/// Partition sums of the solution's tables along Z (a partition of [0, t]).
/// Entry j approximates c_j(t), which should equal lambda_j * t.
inline std::vector<double> coefficient_integrals(const LmrOracle& oracle, const ConstantCoeffSolution& sol,
                                                 std::span<const double> Z) {
    if (Z.size() < 2) return std::vector<double>(sol.slit_count(), 0.0);
    std::vector<Table> tables;
    for (size_t j = 0; j < sol.slit_count(); ++j) tables.push_back(sol.u_table(j));
    return oracle.sums(tables, Z).s;
}

/// max over grid times of |lmr(u_1(t), ..., u_m(t)) - t|, through the oracle.
inline double normalization_error(const LmrOracle& oracle, const ConstantCoeffSolution& sol) {
    double worst = 0.0;
    std::vector<double> f(sol.slit_count());
    for (size_t i = 0; i < sol.times.size(); ++i) {
        for (size_t j = 0; j < f.size(); ++j) f[j] = sol.u[j][i];
        worst = std::max(worst, std::abs(oracle.lmr_at(f) - sol.times[i]));
    }
    return worst;
}

}  // namespace loewner::bangbang
