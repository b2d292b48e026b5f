#pragma once

// File formats: canonical slit-system JSON, solution CSV + sidecar, traces
// CSV, report JSON, and provenance stamps.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/bangbang.hpp"
#include "loewner/forward.hpp"
#include "loewner/geometry.hpp"
#include "loewner/roundtrip.hpp"

namespace loewner::io {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct Provenance {
    std::string config_hash;
    std::string version = kVersion;

    static Provenance of(const std::string& config) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config)));
        return {buf, kVersion};
    }

    std::string comment() const { return "# loewner " + version + " config " + config_hash + "\n"; }
    json to_json() const { return {{"version", version}, {"config_hash", config_hash}}; }
};

// ---- slit systems ----

inline json to_json(const SlitSystem& system) {
    json slits = json::array();
    for (const auto& s : system.slits) {
        json pts = json::array();
        for (const cplx p : s.points) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
                throw std::invalid_argument("slit coordinates must be finite");
            pts.push_back({p.real(), p.imag()});
        }
        slits.push_back(std::move(pts));
    }
    return {{"slits", std::move(slits)}, {"extension_headroom", system.extension_headroom}};
}

inline SlitSystem system_from_json(const json& j) {
    if (!j.is_object() || !j.contains("slits") || !j["slits"].is_array())
        throw std::invalid_argument("slit system JSON needs a \"slits\" array");
    SlitSystem system;
    for (const auto& s : j["slits"]) {
        Slit slit;
        for (const auto& p : s) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw std::invalid_argument("points must be [re, im] pairs");
            slit.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        system.slits.push_back(std::move(slit));
    }
    if (j.contains("extension_headroom")) system.extension_headroom = j["extension_headroom"].get<double>();
    if (!(system.extension_headroom > 0.0)) throw std::invalid_argument("extension_headroom must be positive");
    return system;
}

inline std::string emit(const SlitSystem& system) { return to_json(system).dump() + "\n"; }

inline SlitSystem parse(const std::string& text) { return system_from_json(json::parse(text)); }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// ---- construct output ----

inline std::string solution_csv(const bangbang::ConstantCoeffSolution& sol, const Provenance& prov) {
    const size_t m = sol.slit_count();
    std::ostringstream os;
    os << prov.comment() << "t";
    for (size_t j = 0; j < m; ++j) os << ",u_" << j + 1;
    for (size_t j = 0; j < m; ++j) os << ",xi_" << j + 1 << "_re,xi_" << j + 1 << "_im";
    os << "\n";
    for (size_t i = 0; i < sol.times.size(); ++i) {
        os << fmt(sol.times[i]);
        for (size_t j = 0; j < m; ++j) os << "," << fmt(sol.u[j][i]);
        for (size_t j = 0; j < m; ++j) os << "," << fmt(sol.xi[j][i].real()) << "," << fmt(sol.xi[j][i].imag());
        os << "\n";
    }
    return os.str();
}

inline json sidecar(const bangbang::ConstantCoeffSolution& sol, const Provenance& prov) {
    json levels = json::array();
    for (const auto& l : sol.levels) levels.push_back({{"n", l.n}, {"lambda", l.lambda}, {"residual", l.residual}});
    return {{"lambda", sol.lambda},   {"L", sol.L},
            {"levels", levels},       {"converged", sol.converged},
            {"resolution", sol.resolution}, {"provenance", prov.to_json()}};
}

/// Rebuilds a solution from the construct CSV and its sidecar.
inline bangbang::ConstantCoeffSolution read_solution(const std::string& csv, const json& side) {
    bangbang::ConstantCoeffSolution sol;
    sol.lambda = side.at("lambda").get<std::vector<double>>();
    sol.L = side.at("L").get<double>();
    sol.converged = side.value("converged", false);
    sol.resolution = side.value("resolution", 0);
    for (const auto& l : side.value("levels", json::array()))
        sol.levels.push_back({l.at("n").get<int>(), l.at("lambda").get<std::vector<double>>(), l.at("residual").get<double>()});
    const size_t m = sol.lambda.size();
    sol.u.resize(m);
    sol.xi.resize(m);
    std::istringstream in(csv);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::vector<double> v;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 1 + 3 * m) throw std::invalid_argument("solution CSV row has the wrong number of columns");
        sol.times.push_back(v[0]);
        for (size_t j = 0; j < m; ++j) {
            sol.u[j].push_back(v[1 + j]);
            sol.xi[j].emplace_back(v[1 + m + 2 * j], v[2 + m + 2 * j]);
        }
    }
    if (sol.times.size() < 2) throw std::invalid_argument("solution CSV has no data rows");
    return sol;
}

// ---- forward output ----

inline std::string traces_csv(const evolution::TraceResult& tr, const Provenance& prov) {
    std::ostringstream os;
    os << prov.comment() << "slit,t,re,im\n";
    for (size_t k = 0; k < tr.traces.size(); ++k)
        for (size_t n = 0; n < tr.traces[k].size(); ++n)
            os << k << "," << fmt(tr.times[n]) << "," << fmt(tr.traces[k][n].real()) << ","
               << fmt(tr.traces[k][n].imag()) << "\n";
    return os.str();
}

inline json report_json(const evolution::RoundTripReport& r, const Provenance& prov) {
    return {{"steps", r.steps},
            {"hausdorff", r.hausdorff},
            {"hausdorff_refined", r.hausdorff_refined},
            {"scale", r.scale},
            {"scale_refined", r.scale_refined},
            {"normalization_error", r.normalization_error},
            {"derivative_error", r.derivative_error},
            {"origin_drift", r.origin_drift},
            {"xi_max_jump", r.xi_max_jump},
            {"xi_jump_bound", r.xi_jump_bound},
            {"flags", r.flags},
            {"pass", r.pass},
            {"provenance", prov.to_json()}};
}

inline json error_json(const std::string& kind, const std::string& message, const Provenance& prov) {
    return {{"error", {{"kind", kind}, {"message", message}}}, {"provenance", prov.to_json()}};
}

}  // namespace loewner::io
