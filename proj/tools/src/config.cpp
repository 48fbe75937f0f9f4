#include "flexfn_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "flexfn/error.hpp"
#include "flexfn/params_json.hpp"

namespace flexfn::cli {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
        if (!known) throw ConfigError("unknown config key '" + where + "." + item.key() + "'");
    }
}

template <class T>
T get(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_unsigned()) {
        throw ConfigError("config key '" + where + "." + key + "' must be a nonnegative integer");
    }
    return j.at(key).get<std::size_t>();
}

// A number, a list of numbers, or {"from", "to", "count"}.
std::vector<double> get_values(const json& j, const char* key, std::vector<double> fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    const std::string name = where + "." + key;
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError("config key '" + name + "' must hold numbers");
            out.push_back(e.get<double>());
        }
        if (out.empty()) throw ConfigError("config key '" + name + "' is empty");
        return out;
    }
    if (v.is_object()) {
        check_keys(v, name, {"from", "to", "count"});
        const double from = get(v, "from", 0.0, name), to = get(v, "to", 1.0, name);
        const std::size_t count = get_count(v, "count", 11, name);
        if (count < 1) throw ConfigError("config key '" + name + ".count' must be >= 1");
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        out.back() = to;
        return out;
    }
    throw ConfigError("config key '" + name + "' must be a number, a list or a {from,to,count} range");
}

EigenMode parse_eigen_mode(const std::string& s) {
    if (s == "slowest") return EigenMode::Slowest;
    if (s == "fastest") return EigenMode::Fastest;
    throw ConfigError("eigen_mode must be 'slowest' or 'fastest'");
}

Schedule parse_schedule(const json& j, const std::string& where) {
    check_keys(j, where, {"t", "u", "B"});
    Schedule s;
    s.breakpoints = get_values(j, "t", {0.0}, where);
    s.u_values = get_values(j, "u", {0.5}, where);
    s.b_values = get_values(j, "B", {0.4}, where);
    s.check();
    return s;
}

SimulateRun parse_run(const json& j, const std::string& where) {
    check_keys(j, where, {"x0", "u", "B", "schedule"});
    SimulateRun r;
    r.x0 = get(j, "x0", 0.5, where);
    if (j.contains("schedule")) {
        if (j.contains("u") || j.contains("B")) throw ConfigError(where + ": give either u/B or schedule, not both");
        r.schedule = parse_schedule(j.at("schedule"), where + ".schedule");
    } else {
        r.schedule = Schedule::constant(get(j, "u", 0.5, where), get(j, "B", 0.4, where));
        r.schedule.check();
    }
    return r;
}

SimulateConfig parse_simulate(const json& j) {
    const std::string w = "simulate";
    check_keys(j, w, {"mode", "runs", "dt", "t_end", "n_paths", "record_stride", "sample_paths"});
    SimulateConfig c;
    const auto mode = get<std::string>(j, "mode", "ode", w);
    if (mode == "ode") {
        c.mode = SimMode::Ode;
    } else if (mode == "sde") {
        c.mode = SimMode::Sde;
    } else {
        throw ConfigError("simulate.mode must be 'ode' or 'sde'");
    }
    if (j.contains("runs")) {
        if (!j.at("runs").is_array() || j.at("runs").empty()) throw ConfigError("simulate.runs must be a nonempty list");
        for (std::size_t i = 0; i < j.at("runs").size(); ++i) {
            c.runs.push_back(parse_run(j.at("runs")[i], w + ".runs[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("dt")) c.dt = get(j, "dt", 0.0, w);
    if (j.contains("t_end")) c.t_end = get(j, "t_end", 0.0, w);
    c.n_paths = get_count(j, "n_paths", c.n_paths, w);
    c.record_stride = get_count(j, "record_stride", c.record_stride, w);
    c.sample_paths = get_count(j, "sample_paths", c.sample_paths, w);
    if (c.record_stride < 1) throw ConfigError("simulate.record_stride must be >= 1");
    return c;
}

DensityConfig parse_density(const json& j) {
    const std::string w = "density";
    check_keys(j, w, {"u", "B", "x0", "n_cells", "times", "max_dt", "mc_paths", "mc_bins", "mc_t_end", "eigen_mode"});
    DensityConfig c;
    c.u = get_values(j, "u", c.u, w);
    c.baseline = get_values(j, "B", c.baseline, w);
    c.x0 = get(j, "x0", c.x0, w);
    c.n_cells = get_count(j, "n_cells", c.n_cells, w);
    c.times = get_values(j, "times", {}, w);
    c.max_dt = get(j, "max_dt", c.max_dt, w);
    c.mc_paths = get_count(j, "mc_paths", c.mc_paths, w);
    c.mc_bins = get_count(j, "mc_bins", c.mc_bins, w);
    if (j.contains("mc_t_end")) c.mc_t_end = get(j, "mc_t_end", 0.0, w);
    c.eigen_mode = parse_eigen_mode(get<std::string>(j, "eigen_mode", "slowest", w));
    if (c.u.size() != c.baseline.size() && c.u.size() != 1 && c.baseline.size() != 1) {
        throw ConfigError("density.u and density.B must have equal lengths (or one of them a single value)");
    }
    return c;
}

SweepConfig parse_sweep(const json& j) {
    const std::string w = "sweep";
    check_keys(j, w, {"u", "B", "n_cells", "eigen_mode"});
    SweepConfig c;
    c.u = get_values(j, "u", c.u, w);
    c.baseline = get_values(j, "B", c.baseline, w);
    c.n_cells = get_count(j, "n_cells", c.n_cells, w);
    c.eigen_mode = parse_eigen_mode(get<std::string>(j, "eigen_mode", "slowest", w));
    return c;
}

CertifyConfig parse_certify(const json& j) {
    const std::string w = "certify";
    check_keys(j, w, {"u_star", "B_star", "theta", "grid_n", "target_radius"});
    CertifyConfig c;
    c.u_star = get(j, "u_star", c.u_star, w);
    c.b_star = get(j, "B_star", c.b_star, w);
    c.theta = get(j, "theta", c.theta, w);
    c.grid_n = get(j, "grid_n", c.grid_n, w);
    c.target_radius = get(j, "target_radius", c.target_radius, w);
    return c;
}

ExamplesConfig parse_examples(const json& j) {
    const std::string w = "examples";
    check_keys(j, w, {"cases", "omega", "dt", "t_end", "dts", "n_paths", "lyapunov_t", "lyapunov_paths"});
    ExamplesConfig c;
    if (j.contains("cases")) {
        if (!j.at("cases").is_array() || j.at("cases").empty()) throw ConfigError("examples.cases must be a nonempty list");
        c.cases.clear();
        for (std::size_t i = 0; i < j.at("cases").size(); ++i) {
            const auto& e = j.at("cases")[i];
            const std::string where = w + ".cases[" + std::to_string(i) + "]";
            check_keys(e, where, {"r1", "r2", "x0"});
            c.cases.push_back({get(e, "r1", 1.0, where), get(e, "r2", -1.2, where), get(e, "x0", 1.0, where)});
        }
    }
    c.omega = get(j, "omega", c.omega, w);
    c.dt = get(j, "dt", c.dt, w);
    c.t_end = get(j, "t_end", c.t_end, w);
    c.dts = get_values(j, "dts", {}, w);
    c.n_paths = get_count(j, "n_paths", c.n_paths, w);
    c.lyapunov_t = get(j, "lyapunov_t", c.lyapunov_t, w);
    c.lyapunov_paths = get_count(j, "lyapunov_paths", c.lyapunov_paths, w);
    return c;
}

}  // namespace

RunConfig parse_config(const json& j) {
    check_keys(j, "config", {"params", "seed", "threads", "simulate", "density", "sweep", "certify", "examples"});
    RunConfig c;
    if (j.contains("params")) {
        try {
            c.params = params_from_json(j.at("params"), FlexParams::reference());
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config key 'params': ") + e.what());
        }
    }
    c.seed = get_count(j, "seed", 0, "config");
    c.threads = static_cast<unsigned>(get_count(j, "threads", 1, "config"));
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
    if (j.contains("simulate")) c.simulate = parse_simulate(j.at("simulate"));
    if (j.contains("density")) c.density = parse_density(j.at("density"));
    if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));
    if (j.contains("certify")) c.certify = parse_certify(j.at("certify"));
    if (j.contains("examples")) c.examples = parse_examples(j.at("examples"));
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character
        const std::size_t at = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << path.string() << ':' << line << ':' << col << ": JSON parse error: " << e.what();
        throw ConfigError(msg.str());
    }
    return parse_config(j);
}

}  // namespace flexfn::cli
