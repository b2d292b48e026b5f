// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "loewner/loewner.hpp"

using namespace loewner;

namespace {

constexpr double kClosedFormTolCoarse = 1e-3;   // R = 2000
constexpr double kClosedFormTolFine = 1e-4;     // R = 8000
constexpr double kRatioEps = 0.25;
constexpr int kGrid = 33;
constexpr int kOffGridSamples = 400;
constexpr double kTelescopeTol = 1e-5;
constexpr double kSymLambdaTol = 1e-2;
constexpr double kSymTableTol = 1e-3;
constexpr double kLinearityLo = 0.35;
constexpr double kLinearityHi = 0.65;
constexpr double kNormalizationTol = 5e-6;
constexpr double kUniquenessTol = 1e-2;
constexpr double kDerivativeTol = 1e-6;
constexpr double kOriginTol = 1e-12;
constexpr double kInverseTol = 2e-2;
constexpr int kLevel = 6;

int failures = 0;

void line(const std::string& id, bool ok, const std::string& detail) {
    std::printf("%s %s  %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double radial_lmr(double x) { return std::log((1 + x) * (1 + x) / (4 * x)); }

struct Solved {
    std::unique_ptr<LmrOracle> oracle;
    bangbang::ConstantCoeffSolution sol;
};

bangbang::Options at_level(int j, int base = 2) {
    bangbang::Options o;
    o.min_level = j;
    o.max_level = j;
    o.base = base;
    return o;
}

Solved& solved(const std::string& name) {
    static std::map<std::string, Solved> cache;
    auto& s = cache[name];
    if (!s.oracle) {
        s.oracle = std::make_unique<LmrOracle>(fixtures::by_name(name));
        s.sol = bangbang::construct(*s.oracle, at_level(kLevel));
    }
    return s;
}

// sup over [0, L] of |a - b| for two piecewise linear tables, sampled on both grids
double table_gap(const Table& a, const Table& b) {
    std::vector<double> ts = a.x;
    ts.insert(ts.end(), b.x.begin(), b.x.end());
    double worst = 0.0;
    for (double t : ts) worst = std::max(worst, std::abs(a(t) - b(t)));
    return worst;
}

void closed_forms() {
    double worst[2] = {0.0, 0.0};
    const int res[2] = {2000, 8000};
    for (int r = 0; r < 2; ++r) {
        for (double x : {3 - 2 * std::sqrt(2.0), 0.2, 0.5, 0.8}) {
            const cplx b = std::polar(1.0, 10 * x);
            const auto m = zipper::map_disk_minus_slits(std::vector<Slit>{Slit{{b, x * b}}}, res[r]);
            worst[r] = std::max(worst[r], std::abs(m.lmr_value - radial_lmr(x)));
        }
        // z -> z^2 folds the symmetric pair onto one radial slit
        const auto m = zipper::map_disk_minus_slits(fixtures::symmetric_pair().slits, res[r]);
        worst[r] = std::max(worst[r], std::abs(m.lmr_value - 0.5 * radial_lmr(0.25)));
    }
    line("closed_form_lmr", worst[0] <= kClosedFormTolCoarse && worst[1] <= kClosedFormTolFine,
         fmt("err(R=2000)=%.2e err(R=8000)=%.2e", worst[0], worst[1]));
}

void ratio_suite() {
    const auto& o = *solved("asymmetric").oracle;
    const auto g = o.grid(kGrid);
    bool monotone = true;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j + 1 < kGrid; ++j)
            monotone = monotone && g[i][j + 1] > g[i][j] && g[j + 1][i] > g[j][i];
    line("lmr_monotone", monotone, "33x33 grid, asymmetric fixture");

    double delta = 0.0;
    try {
        delta = o.continuity_modulus(kRatioEps, kGrid);
    } catch (const AccuracyFloor& e) {
        line("ratio_continuity", false, e.what());
        return;
    }
    const int gap = static_cast<int>(std::lround(delta * (kGrid - 1)));
    const double on_grid = LmrOracle::worst_ratio_deviation(g, gap);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> pos(0.0, 1.0), width(0.25, 1.0);
    double off_grid = 0.0;
    for (int s = 0; s < kOffGridSamples; ++s) {
        const double da = delta * width(rng), db = delta * width(rng);
        const double a1 = (1.0 - da) * pos(rng), b1 = (1.0 - db) * pos(rng);
        const double a2 = a1 + da, b2 = b1 + db;
        const double num = o.lmr_at({a2, b1}) - o.lmr_at({a1, b1});
        const double den = o.lmr_at({a2, b2}) - o.lmr_at({a1, b2});
        off_grid = std::max(off_grid, std::abs(num / den - 1.0));
    }
    line("ratio_continuity", on_grid < kRatioEps && off_grid < kRatioEps,
         fmt("delta=%.4f grid dev=%.3f off-grid dev=%.3f", delta, on_grid, off_grid));
}

void telescoping() {
    double worst = 0.0;
    for (const std::string name : {"asymmetric", "curved"}) {
        auto& s = solved(name);
        const std::vector<Table> tables{s.sol.u_table(0), s.sol.u_table(1)};
        for (int N : {3, 8, 16}) {
            std::vector<double> Z;
            for (int i = 0; i <= N; ++i) Z.push_back(s.sol.L * i / N);
            const auto S = s.oracle->sums(tables, Z);
            const double t = Z.back();
            worst = std::max({worst, std::abs(S.s1() + S.s2_tilde() - t), std::abs(S.s2() + S.s1_tilde() - t)});
        }
    }
    line("telescoping", worst <= kTelescopeTol, fmt("max |s_j + s~_k - t| = %.2e", worst));
}

void symmetry() {
    const auto& s = solved("symmetric").sol;
    const double dl = std::abs(s.lambda[0] - 0.5);
    double du = 0.0;
    for (size_t i = 0; i < s.times.size(); ++i) du = std::max(du, std::abs(s.u[0][i] - s.u[1][i]));
    line("symmetry", dl <= kSymLambdaTol && du <= kSymTableTol, fmt("|lambda-1/2|=%.2e sup|u-v|=%.2e", dl, du));
}

void linearity() {
    auto& s = solved("asymmetric");
    const std::vector<Table> tables{s.sol.u_table(0), s.sol.u_table(1)};
    std::vector<double> errs;
    for (int N : {2, 4, 8, 16}) {
        double worst = 0.0;
        for (int e = 1; e <= N; ++e) {
            std::vector<double> Z;
            for (int i = 0; i <= e; ++i) Z.push_back(s.sol.L * i / N);
            const auto S = s.oracle->sums(tables, Z);
            worst = std::max(worst, std::abs(S.s1() - s.sol.lambda[0] * Z.back()));
        }
        errs.push_back(worst);
    }
    bool ok = true;
    std::string detail = "ratios";
    for (size_t i = 1; i < errs.size(); ++i) {
        const double r = errs[i] / errs[i - 1];
        ok = ok && r >= kLinearityLo && r <= kLinearityHi;
        detail += fmt(" %.3f", r);
    }
    line("linearity", ok, detail + fmt(" (err N=16: %.2e)", errs.back()));
}

void normalization() {
    double worst = 0.0;
    std::string detail;
    for (const auto& name : fixtures::names()) {
        auto& s = solved(name);
        const double e = bangbang::normalization_error(*s.oracle, s.sol);
        worst = std::max(worst, e);
        detail += name + fmt("=%.1e ", e);
    }
    line("normalization", worst <= kNormalizationTol, detail);
}

void roundtrip() {
    for (const auto& name : fixtures::names()) {
        auto& s = solved(name);
        const auto rep = evolution::roundtrip_report(*s.oracle, s.sol);
        const double h = *std::max_element(rep.hausdorff.begin(), rep.hausdorff.end());
        const double hr = *std::max_element(rep.hausdorff_refined.begin(), rep.hausdorff_refined.end());
        const bool ok = h <= 3.0 * rep.scale && hr <= 3.0 * rep.scale_refined && hr <= h + 1e-9;
        line("roundtrip_" + name, ok,
             fmt("S=n: d=%.2e scale=%.2e; ", h, rep.scale) + fmt("S=2n: d=%.2e scale=%.2e", hr, rep.scale_refined));
    }
}

void uniqueness() {
    // scored on lambda; the table gap is printed for information
    double dl_base = 0.0, dl_ext = 0.0, gap_base = 0.0, gap_ext = 0.0;
    for (const auto& name : fixtures::names()) {
        auto& s = solved(name);
        const auto tri = bangbang::construct(*s.oracle, at_level(4, 3));
        dl_base = std::max(dl_base, std::abs(tri.lambda[0] - s.sol.lambda[0]));
        for (size_t j = 0; j < s.sol.slit_count(); ++j)
            gap_base = std::max(gap_base, table_gap(tri.u_table(j), s.sol.u_table(j)));

        auto sys = fixtures::by_name(name);
        sys.extension_headroom = 2.0;
        OracleOptions oo;
        oo.extend.turn_per_step = 0.05;
        const LmrOracle other(sys, oo);
        const auto alt = bangbang::construct(other, at_level(kLevel));
        dl_ext = std::max(dl_ext, std::abs(alt.lambda[0] - s.sol.lambda[0]));
        for (size_t j = 0; j < s.sol.slit_count(); ++j)
            gap_ext = std::max(gap_ext, table_gap(alt.u_table(j), s.sol.u_table(j)));
    }
    line("uniqueness_partition", dl_base <= kUniquenessTol,
         fmt("2^6 vs 3^4: max |dlambda| = %.2e (sup table gap %.2e)", dl_base, gap_base));
    line("uniqueness_extension", dl_ext <= kUniquenessTol,
         fmt("straight vs bent, longer extension: max |dlambda| = %.2e (sup table gap %.2e)", dl_ext, gap_ext));
}

void forward_law() {
    const std::vector<double> lambda{0.6, 0.4};
    const double L = 0.7;
    std::vector<double> t;
    std::vector<cplx> a, b;
    for (int i = 0; i <= 7; ++i) {
        t.push_back(L * i / 7);
        a.push_back(std::polar(1.0, 0.3 * std::sin(1.0 * i)));
        b.push_back(std::polar(1.0, std::numbers::pi + 0.2 * i));
    }
    const std::vector<DrivingTable> xi{{t, a, DrivingTable::Interp::PiecewiseConstant},
                                                  {t, b, DrivingTable::Interp::PiecewiseConstant}};
    const std::vector<cplx> pts{0.0, cplx(0.2, 0.3), cplx(-0.4, -0.1)};
    const auto r = evolution::solve_forward(lambda, xi, L, pts);
    double dlog = 0.0, origin = 0.0;
    for (size_t n = 0; n < r.times.size(); ++n)
        dlog = std::max(dlog, std::abs(r.log_derivative_at_0[n] - r.times[n]) / std::max(r.times[n], 1.0));
    for (const cplx h : r.trajectories[0].values) origin = std::max(origin, std::abs(h));
    line("forward_law", dlog <= kDerivativeTol && origin <= kOriginTol,
         fmt("max |log h'(0) - t| = %.2e, max |h(0)| = %.2e", dlog, origin));
}

void synthetic_inverse() {
    const std::vector<double> lambda{0.7, 0.3};
    const double L = 0.8;
    std::vector<double> ts;
    std::vector<cplx> a, b;
    for (int i = 0; i <= 400; ++i) {
        const double s = L * i / 400;
        ts.push_back(s);
        a.push_back(std::polar(1.0, 0.4 * std::sin(2 * s)));
        b.push_back(std::polar(1.0, std::numbers::pi - 0.6 * s));
    }
    const std::vector<DrivingTable> xi{{ts, a}, {ts, b}};
    const auto tr = evolution::regenerate_traces(lambda, xi, L, 200);
    SlitSystem sys;
    for (const auto& c : tr.traces) sys.slits.push_back(Slit{c});
    const LmrOracle o(sys);
    const auto sol = bangbang::construct(o, at_level(kLevel));
    const double d = std::abs(sol.lambda[0] - lambda[0]);
    line("synthetic_inverse", d <= kInverseTol, fmt("lambda=%.4f (true 0.7), L=%.5f (true 0.8)", sol.lambda[0], sol.L));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<void (*)()> checks{closed_forms, ratio_suite, telescoping,  symmetry,   linearity,
                                         normalization, roundtrip,  uniqueness,   forward_law, synthetic_inverse};
    for (auto check : checks) {
        try {
            check();
        } catch (const std::exception& e) {
            line("exception", false, e.what());
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d failure(s), %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
