#pragma once

// Verification of a constructed solution by running the evolution forward.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "loewner/bangbang.hpp"
#include "loewner/forward.hpp"
#include "loewner/geometry.hpp"
#include "loewner/lmr_oracle.hpp"

namespace loewner::evolution {

struct RoundTripOptions {
    /// Splitting steps; 0 uses the solution's own grid.
    int steps = 0;
    double hausdorff_sample = 1e-4;
    /// Hausdorff distance allowed, in units of the trace scale.
    double scale_factor = 3.0;
    /// Slack for "decreases under step halving" once the distance sits at
    /// rounding level.
    double decrease_floor = 1e-9;
    double normalization_bound = 5e-6;
    double derivative_bound = 1e-6;
    double origin_bound = 1e-12;
    /// Allowed adjacent jump of a driving function: factor * sqrt(dt).
    double jump_factor = 5.0;
    ForwardOptions forward;
};

struct RoundTripReport {
    int steps = 0;
    std::vector<double> hausdorff;          // per slit, at `steps`
    std::vector<double> hausdorff_refined;  // per slit, at 2 * `steps`
    double scale = 0;
    double scale_refined = 0;
    double normalization_error = 0;
    double derivative_error = 0;
    double origin_drift = 0;
    std::vector<double> xi_max_jump;
    double xi_jump_bound = 0;
    std::vector<std::string> flags;
    bool pass = false;
};

namespace detail {

inline double worst_hausdorff(const TraceResult& tr, const SlitSystem& system, double sample,
                              std::vector<double>& per_slit) {
    per_slit.clear();
    for (size_t k = 0; k < system.slits.size(); ++k)
        per_slit.push_back(geometry::hausdorff(tr.traces[k], system.slits[k].points, sample));
    return *std::max_element(per_slit.begin(), per_slit.end());
}

}  // namespace detail

inline RoundTripReport roundtrip_report(const LmrOracle& oracle, const bangbang::ConstantCoeffSolution& sol,
                                        const RoundTripOptions& opts = {}) {
    const auto& system = oracle.system();
    const size_t m = sol.slit_count();
    std::vector<DrivingTable> xi;
    for (size_t j = 0; j < m; ++j) xi.push_back(sol.xi_table(j));

    RoundTripReport rep;
    rep.steps = opts.steps > 0 ? opts.steps : static_cast<int>(sol.times.size()) - 1;
    const auto coarse = regenerate_traces(sol.lambda, xi, sol.L, rep.steps);
    const auto fine = regenerate_traces(sol.lambda, xi, sol.L, 2 * rep.steps);
    rep.scale = coarse.scale;
    rep.scale_refined = fine.scale;
    const double hd = detail::worst_hausdorff(coarse, system, opts.hausdorff_sample, rep.hausdorff);
    const double hd_fine = detail::worst_hausdorff(fine, system, opts.hausdorff_sample, rep.hausdorff_refined);
    if (hd > opts.scale_factor * rep.scale || hd_fine > opts.scale_factor * rep.scale_refined)
        rep.flags.push_back("hausdorff");
    for (size_t k = 0; k < m; ++k)
        if (rep.hausdorff_refined[k] > rep.hausdorff[k] + opts.decrease_floor) rep.flags.push_back("refinement");

    rep.normalization_error = bangbang::normalization_error(oracle, sol);
    if (rep.normalization_error > opts.normalization_bound) rep.flags.push_back("normalization");

    const std::vector<cplx> origin{cplx{0.0, 0.0}};
    const auto fw = solve_forward(sol.lambda, xi, sol.L, origin, opts.forward);
    for (size_t i = 0; i < fw.times.size(); ++i)
        rep.derivative_error = std::max(rep.derivative_error, std::abs(fw.log_derivative_at_0[i] - fw.times[i]) /
                                                                  std::max(fw.times[i], 1.0));
    for (const cplx h : fw.trajectories.front().values) rep.origin_drift = std::max(rep.origin_drift, std::abs(h));
    if (rep.derivative_error > opts.derivative_bound) rep.flags.push_back("derivative");
    if (rep.origin_drift > opts.origin_bound) rep.flags.push_back("origin");

    const double dt = sol.L / (static_cast<double>(sol.times.size()) - 1.0);
    rep.xi_jump_bound = opts.jump_factor * std::sqrt(dt);
    for (size_t j = 0; j < m; ++j) {
        rep.xi_max_jump.push_back(xi[j].max_jump());
        if (rep.xi_max_jump.back() > rep.xi_jump_bound) rep.flags.push_back("continuity");
    }
    std::sort(rep.flags.begin(), rep.flags.end());
    rep.flags.erase(std::unique(rep.flags.begin(), rep.flags.end()), rep.flags.end());
    rep.pass = rep.flags.empty();
    return rep;
}

}  // namespace loewner::evolution
