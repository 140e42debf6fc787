#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kawaflat/config.hpp"
#include "kawaflat/genfun.hpp"
#include "kawaflat/kawahara_fd.hpp"
#include "kawaflat/reach.hpp"

namespace kawaflat {

// CSV values use '.' decimal separator and 17 significant digits so that
// doubles round-trip exactly.
[[nodiscard]] inline std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_controls_csv(const std::string& path, const ControlSignal& sig) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,h1,h2\n";
    for (std::size_t i = 0; i < sig.times.size(); ++i)
        out << fmt_full(sig.times[i]) << ',' << fmt_full(sig.h1[i]) << ',' << fmt_full(sig.h2[i]) << '\n';
}

inline void write_snapshot_csv(const std::string& path, const GridState& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "x,u\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) out << fmt_full(s.x[i]) << ',' << fmt_full(s.u[i]) << '\n';
}

inline void write_manifest(const std::string& path, const std::vector<double>& times,
                           const std::vector<std::string>& files) {
    nlohmann::json j;
    j["times"] = times;
    j["files"] = files;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

[[nodiscard]] inline nlohmann::json config_echo(const ExperimentConfig& c) {
    nlohmann::json j;
    j["mode"] = mode_name(c.mode);
    j["s"] = c.s;
    j["K"] = c.K;
    j["tau"] = c.tau;
    j["T"] = c.T;
    j["J_max"] = c.j_max;
    j["N"] = c.order;
    j["nx"] = c.nx;
    j["theta"] = c.theta;
    j["dt"] = c.dt;
    j["mu0"] = c.mu0;
    j["seed"] = c.seed;
    j["u0"] = c.u0_preset;
    if (!c.target_path.empty()) j["target"] = c.target_path;
    return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

/// Family dump schema: {variant, J_max, order, f: [[a_k]], g: [[a_k]]}.
[[nodiscard]] inline nlohmann::json family_json(const GeneratingFamily& fam) {
    nlohmann::json j;
    j["variant"] = (fam.variant == FamilyVariant::toy) ? "toy" : "full";
    j["J_max"] = fam.j_max;
    j["order"] = fam.order;
    auto arr = [](const std::vector<PowerSeries>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& p : v) a.push_back(p.coeffs);
        return a;
    };
    j["f"] = arr(fam.f);
    j["g"] = arr(fam.g);
    return j;
}

/// Target file schema: {coeffs: [a_k], radius: R}.
[[nodiscard]] inline ReachTarget read_target_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("target file not found: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("coeffs") || !j.contains("radius"))
        throw std::invalid_argument("target file must contain 'coeffs' and 'radius'");
    ReachTarget t;
    t.u1 = PowerSeries(0.0, j["coeffs"].get<std::vector<double>>());
    t.radius = j["radius"].get<double>();
    if (j.contains("n_check")) t.n_check = j["n_check"].get<int>();
    return t;
}

inline void write_target_json(const std::string& path, const ReachTarget& t) {
    nlohmann::json j;
    j["coeffs"] = t.u1.coeffs;
    j["radius"] = t.radius;
    j["n_check"] = t.n_check;
    write_json(path, j);
}

} // namespace kawaflat
