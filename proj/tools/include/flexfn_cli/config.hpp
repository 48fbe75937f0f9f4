#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flexfn/bilinear.hpp"
#include "flexfn/dynamics.hpp"
#include "flexfn/flex_model.hpp"
#include "flexfn/generator.hpp"

namespace flexfn::cli {

enum class SimMode { Ode, Sde };

struct SimulateRun {
    double x0 = 0.5;
    Schedule schedule;
};

struct SimulateConfig {
    SimMode mode = SimMode::Ode;
    std::vector<SimulateRun> runs;      // defaults to x0 = 0.1..0.9 at u = 0.5, B = 0.4
    std::optional<double> dt, t_end;    // defaults 0.01 C and 20 C
    std::size_t n_paths = 100;
    std::size_t record_stride = 1;
    std::size_t sample_paths = 0;       // raw paths written next to the summary
};

struct DensityConfig {
    std::vector<double> u{0.2}, baseline{0.4};  // one case per (u, B) pair
    double x0 = 0.5;
    std::size_t n_cells = 200;
    std::vector<double> times;  // empty: 41 points on [0, 20 C]
    double max_dt = 0.01;
    std::size_t mc_paths = 0;   // Monte Carlo cross-check; 0 disables it
    std::size_t mc_bins = 100;
    std::optional<double> mc_t_end;  // default 20 C
    EigenMode eigen_mode = EigenMode::Slowest;
};

struct SweepConfig {
    std::vector<double> u{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> baseline{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::size_t n_cells = 200;
    EigenMode eigen_mode = EigenMode::Slowest;
};

struct CertifyConfig {
    double u_star = 0.0;
    double b_star = 0.4;
    double theta = 0.5;
    int grid_n = 2001;
    double target_radius = 1.0;
};

struct ExamplesConfig {
    std::vector<BilinearParams> cases{{1.0, -1.2, 1.0}, {1.0, 2.0, 1.0}};
    double omega = 1.0;
    double dt = 1.0 / 1024;
    double t_end = 5.0;
    std::vector<double> dts;  // default 2^-6 .. 2^-12
    std::size_t n_paths = 1000;
    double lyapunov_t = 10.0;
    std::size_t lyapunov_paths = 1000;
};

struct RunConfig {
    FlexParams params = FlexParams::reference();
    std::uint64_t seed = 0;
    unsigned threads = 1;
    SimulateConfig simulate;
    DensityConfig density;
    SweepConfig sweep;
    CertifyConfig certify;
    ExamplesConfig examples;
};

/// Builds a run config; missing keys take defaults, unknown keys throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);

/// Reads and parses a config file. Syntax errors are reported as ConfigError with line:column.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace flexfn::cli
