#pragma once

// Pipeline driver behind the command-line tool. Every artifact is written
// under `out` and stamped with the config hash.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loewner/bangbang.hpp"
#include "loewner/fixtures.hpp"
#include "loewner/forward.hpp"
#include "loewner/io.hpp"
#include "loewner/lmr_oracle.hpp"
#include "loewner/roundtrip.hpp"

namespace loewner::cli {

struct RunConfig {
    std::string input;    // slit-system JSON; empty means use `fixture`
    std::string out = ".";
    double accuracy = 1e-6;
    int max_level = 6;
    double lambda_tolerance = 1e-3;
    int steps = 0;        // 0: the construct grid
    std::string fixture = "asymmetric";
    int grid = 33;
    std::vector<double> epsilons{1.0, 0.5, 0.25};

    std::vector<std::string> problems() const {
        std::vector<std::string> p;
        if (!(accuracy > 0.0)) p.push_back("accuracy must be positive");
        if (!(lambda_tolerance > 0.0)) p.push_back("lambda tolerance must be positive");
        if (max_level < 2) p.push_back("max level must be at least 2");
        if (steps < 0) p.push_back("steps must be nonnegative");
        if (grid < 2) p.push_back("grid must have at least 2 points");
        for (double e : epsilons)
            if (!(e > 0.0)) p.push_back("epsilons must be positive");
        return p;
    }

    /// Canonical text of everything that influences the outputs.
    std::string canonical(const SlitSystem& system) const {
        io::json j{{"accuracy", accuracy}, {"max_level", max_level}, {"lambda_tolerance", lambda_tolerance},
                   {"steps", steps},       {"grid", grid},           {"epsilons", epsilons},
                   {"system", io::to_json(system)}};
        return j.dump();
    }
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"validate", "lmr-grid", "lemma-check", "construct",
                                            "forward",  "roundtrip", "report"};
    return c;
}

inline std::string describe(const std::string& command) {
    static const std::map<std::string, std::string> d{
        {"validate", "check a slit system and write validate.json"},
        {"lmr-grid", "tabulate lmr over prefix fractions into lmr_grid.csv"},
        {"lemma-check", "monotonicity and ratio-continuity report in lemma_check.json"},
        {"construct", "weights, prefix tables and driving functions into solution.csv/json"},
        {"forward", "regenerate traces from a solution into traces.csv and forward.json"},
        {"roundtrip", "compare regenerated traces with the input into report.json"},
        {"report", "construct, forward and roundtrip in one run"}};
    const auto it = d.find(command);
    return it == d.end() ? std::string{} : it->second;
}

namespace detail {

struct Context {
    RunConfig cfg;
    SlitSystem system;
    io::Provenance prov;
    std::filesystem::path out;

    void write(const std::string& name, const std::string& text) const { io::write_file((out / name).string(), text); }
    void write(const std::string& name, const io::json& j) const { write(name, j.dump(2) + "\n"); }
};

inline OracleOptions oracle_options(const RunConfig& cfg) {
    OracleOptions o;
    o.accuracy = cfg.accuracy;
    return o;
}

inline bangbang::Options construct_options(const RunConfig& cfg) {
    bangbang::Options o;
    o.max_level = cfg.max_level;
    o.lambda_tolerance = cfg.lambda_tolerance;
    return o;
}

inline bangbang::ConstantCoeffSolution load_solution(const Context& c) {
    return io::read_solution(io::read_file((c.out / "solution.csv").string()),
                             io::json::parse(io::read_file((c.out / "solution.json").string())));
}

inline int validate(const Context& c, std::ostream& log) {
    const auto issues = geometry::validate(c.system);
    c.write("validate.json", io::json{{"valid", issues.empty()}, {"issues", issues}, {"provenance", c.prov.to_json()}});
    log << (issues.empty() ? "valid" : "invalid") << "\n";
    for (const auto& i : issues) log << "  " << i << "\n";
    return issues.empty() ? 0 : 1;
}

inline int lmr_grid(const Context& c, std::ostream& log) {
    LmrOracle oracle(c.system, oracle_options(c.cfg));
    const auto g = oracle.grid(c.cfg.grid);
    std::string csv = c.prov.comment() + "f1,f2,lmr\n";
    const int n = c.cfg.grid;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            csv += io::fmt(static_cast<double>(i) / (n - 1)) + "," + io::fmt(static_cast<double>(j) / (n - 1)) + "," +
                   io::fmt(g[i][j]) + "\n";
    c.write("lmr_grid.csv", csv);
    log << "grid " << n << "x" << n << " at resolution " << oracle.resolution() << "\n";
    return 0;
}

inline int lemma_check(const Context& c, std::ostream& log) {
    LmrOracle oracle(c.system, oracle_options(c.cfg));
    const int n = c.cfg.grid;
    const auto g = oracle.grid(n);
    double min_diff = 1e300;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            min_diff = std::min(min_diff, g[i][j + 1] - g[i][j]);
            min_diff = std::min(min_diff, g[j + 1][i] - g[j][i]);
        }
    const bool monotone = min_diff > 0.0;
    io::json eps = io::json::array();
    bool pass = monotone;
    for (double e : c.cfg.epsilons) {
        try {
            const double delta = oracle.continuity_modulus(e, n);
            const int gap = static_cast<int>(std::lround(delta * (n - 1)));
            const double worst = LmrOracle::worst_ratio_deviation(g, gap);
            eps.push_back({{"epsilon", e}, {"delta", delta}, {"worst_ratio_deviation", worst}, {"pass", worst < e}});
            log << "epsilon " << e << ": delta " << delta << ", worst |ratio - 1| " << worst << "\n";
        } catch (const AccuracyFloor& ex) {
            eps.push_back({{"epsilon", e}, {"floor_reached", true}, {"message", ex.what()}, {"pass", false}});
            log << "epsilon " << e << ": " << ex.what() << "\n";
            pass = false;
        }
    }
    c.write("lemma_check.json", io::json{{"grid", n},
                                         {"monotone", monotone},
                                         {"min_difference", min_diff},
                                         {"epsilons", eps},
                                         {"pass", pass},
                                         {"provenance", c.prov.to_json()}});
    log << "monotone: " << (monotone ? "yes" : "no") << "\n";
    return pass ? 0 : 1;
}

inline int construct(const Context& c, std::ostream& log) {
    LmrOracle oracle(c.system, oracle_options(c.cfg));
    const auto sol = bangbang::construct(oracle, construct_options(c.cfg));
    c.write("solution.csv", io::solution_csv(sol, c.prov));
    c.write("solution.json", io::sidecar(sol, c.prov));
    log << "L = " << io::fmt(sol.L) << ", lambda =";
    for (double l : sol.lambda) log << " " << io::fmt(l);
    log << (sol.converged ? "" : " (not converged)") << "\n";
    return 0;
}

inline int forward(const Context& c, std::ostream& log) {
    const auto sol = load_solution(c);
    std::vector<DrivingTable> xi;
    for (size_t j = 0; j < sol.slit_count(); ++j) xi.push_back(sol.xi_table(j));
    const int steps = c.cfg.steps > 0 ? c.cfg.steps : static_cast<int>(sol.times.size()) - 1;
    const auto tr = evolution::regenerate_traces(sol.lambda, xi, sol.L, steps);
    c.write("traces.csv", io::traces_csv(tr, c.prov));
    const std::vector<cplx> origin{cplx{0.0, 0.0}};
    const auto fw = evolution::solve_forward(sol.lambda, xi, sol.L, origin);
    c.write("forward.json", io::json{{"steps", steps},
                                     {"scale", tr.scale},
                                     {"times", fw.times},
                                     {"log_derivative_at_0", fw.log_derivative_at_0},
                                     {"provenance", c.prov.to_json()}});
    log << "traces at " << steps << " steps, scale " << tr.scale << "\n";
    return 0;
}

inline int roundtrip(const Context& c, std::ostream& log) {
    LmrOracle oracle(c.system, oracle_options(c.cfg));
    const auto sol = load_solution(c);
    evolution::RoundTripOptions opts;
    opts.steps = c.cfg.steps;
    const auto rep = evolution::roundtrip_report(oracle, sol, opts);
    c.write("report.json", io::report_json(rep, c.prov));
    log << "round trip " << (rep.pass ? "passed" : "failed");
    for (const auto& f : rep.flags) log << " [" << f << "]";
    log << "\n";
    return rep.pass ? 0 : 1;
}

}  // namespace detail

/// Runs one subcommand. Module errors produce error.json in `out` (and on
/// `err`) and exit status 2.
inline int run(const std::string& command, const RunConfig& cfg, std::ostream& log = std::cout,
               std::ostream& err = std::cerr) {
    detail::Context c;
    c.cfg = cfg;
    c.out = cfg.out;
    auto fail = [&](const std::string& kind, const std::string& msg) {
        const auto j = io::error_json(kind, msg, c.prov);
        err << j.dump() << "\n";
        try {
            std::filesystem::create_directories(c.out);
            c.write("error.json", j);
        } catch (...) {
        }
        return 2;
    };
    try {
        if (const auto p = cfg.problems(); !p.empty()) return fail("config", p.front());
        c.system = cfg.input.empty() ? fixtures::by_name(cfg.fixture) : io::parse(io::read_file(cfg.input));
        c.prov = io::Provenance::of(cfg.canonical(c.system));
        std::filesystem::create_directories(c.out);
        if (command == "validate") return detail::validate(c, log);
        if (const auto issues = geometry::validate(c.system); !issues.empty()) return fail("invalid_system", issues.front());
        if (command == "lmr-grid") return detail::lmr_grid(c, log);
        if (command == "lemma-check") return detail::lemma_check(c, log);
        if (command == "construct") return detail::construct(c, log);
        if (command == "forward") return detail::forward(c, log);
        if (command == "roundtrip") return detail::roundtrip(c, log);
        if (command == "report") {
            int status = detail::construct(c, log);
            if (status == 0) status = detail::forward(c, log);
            if (status == 0) status = detail::roundtrip(c, log);
            return status;
        }
        return fail("usage", "unknown command '" + command + "'");
    } catch (const GeometricConflict& e) {
        return fail("geometric_conflict", e.what());
    } catch (const BracketFailure& e) {
        return fail("bracket_failure", e.what());
    } catch (const NonConvergence& e) {
        return fail("non_convergence", e.what());
    } catch (const AccuracyFloor& e) {
        return fail("accuracy_floor", e.what());
    } catch (const UnsupportedConnectivity& e) {
        return fail("unsupported_connectivity", e.what());
    } catch (const io::json::exception& e) {
        return fail("format", e.what());
    } catch (const std::invalid_argument& e) {
        return fail("invalid_argument", e.what());
    } catch (const std::exception& e) {
        return fail("error", e.what());
    }
}

}  // namespace loewner::cli
