#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kawaflat {

enum class Mode { null_control, reach, genfun_dump, simulate, verify };

[[nodiscard]] inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::null_control: return "null-control";
        case Mode::reach: return "reach";
        case Mode::genfun_dump: return "genfun-dump";
        case Mode::simulate: return "simulate";
        case Mode::verify: return "verify";
    }
    return "?";
}

[[nodiscard]] inline Mode parse_mode(const std::string& s) {
    if (s == "null-control") return Mode::null_control;
    if (s == "reach") return Mode::reach;
    if (s == "genfun-dump") return Mode::genfun_dump;
    if (s == "simulate") return Mode::simulate;
    if (s == "verify") return Mode::verify;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

struct ExperimentConfig {
    Mode mode = Mode::verify;
    double s = 3.0;
    double K = 1.0;
    double tau = 0.5;
    double T = 1.0;
    int j_max = 8;
    int order = 0; // 0 -> derived from j_max
    int nx = 256;
    double theta = 0.5;
    double dt = 0.0; // 0 -> cfl * dx
    double mu0 = 0.0;
    long seed = 20240515;
    std::string output_dir = ".";
    std::string target_path;     // reach mode
    std::string u0_preset = "poly"; // null-control / simulate
    int snapshots = 5;
    bool strict = false;
    bool emit_plotscript = false;
};

namespace detail {

inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& val) {
    auto d = [&] { return std::stod(val); };
    auto i = [&] { return std::stoi(val); };
    if (key == "mode") c.mode = parse_mode(val);
    else if (key == "s") c.s = d();
    else if (key == "K") c.K = d();
    else if (key == "tau") c.tau = d();
    else if (key == "T") c.T = d();
    else if (key == "J_max" || key == "jmax") c.j_max = i();
    else if (key == "N" || key == "order") c.order = i();
    else if (key == "nx") c.nx = i();
    else if (key == "theta") c.theta = d();
    else if (key == "dt") c.dt = d();
    else if (key == "mu0") c.mu0 = d();
    else if (key == "seed") c.seed = std::stol(val);
    else if (key == "output_dir") c.output_dir = val;
    else if (key == "target") c.target_path = val;
    else if (key == "u0") c.u0_preset = val;
    else if (key == "snapshots") c.snapshots = i();
    else if (key == "strict") c.strict = (val == "1" || val == "true");
    else if (key == "emit_plotscript") c.emit_plotscript = (val == "1" || val == "true");
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

} // namespace detail

/// Flat key=value format, '#' comments; unknown keys are errors by name.
[[nodiscard]] inline ExperimentConfig parse_config_file(const std::string& path,
                                                        std::optional<ExperimentConfig> base = {}) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path);
    ExperimentConfig cfg = base.value_or(ExperimentConfig{});
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char ch : line)
            if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(ln) + ": expected key=value");
        detail::set_key(cfg, trimmed.substr(0, eq), trimmed.substr(eq + 1));
    }
    return cfg;
}

/// Mode-specific parameter consistency, checked before any compute.
inline void validate_config(const ExperimentConfig& c) {
    if (c.mu0 != 0.0 && c.mode != Mode::simulate)
        throw std::invalid_argument("mu0 is only valid with mode=simulate (got mode=" + mode_name(c.mode) + ")");
    if (!c.target_path.empty() && c.mode != Mode::reach)
        throw std::invalid_argument("target is only valid with mode=reach");
    if (c.mode == Mode::null_control && !(c.s >= 2.5 && c.s < 5.0))
        throw std::invalid_argument("null-control requires s in [2.5, 5)");
    if (c.mode == Mode::null_control || c.mode == Mode::reach) {
        if (!(c.tau > 0.0 && c.tau < c.T)) throw std::invalid_argument("need 0 < tau < T");
    }
    if (c.j_max < 0) throw std::invalid_argument("J_max must be >= 0");
    if (c.nx < 32) throw std::invalid_argument("nx must be >= 32");
    if (c.theta < 0.5 || c.theta > 1.0) throw std::invalid_argument("theta must lie in [0.5, 1]");
    if (c.u0_preset != "poly" && c.u0_preset != "sine" && c.u0_preset != "zero")
        throw std::invalid_argument("unknown u0 preset '" + c.u0_preset + "' (poly|sine|zero)");
}

} // namespace kawaflat
