#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "flexfn/flex_model.hpp"

namespace flexfn {

/// Piecewise-constant price and baseline: level j holds on [breakpoints[j], breakpoints[j+1]).
struct Schedule {
    std::vector<double> breakpoints{0.0};
    std::vector<double> u_values{0.5};
    std::vector<double> b_values{0.4};

    static Schedule constant(double u, double baseline);

    /// Throws ConfigError on mismatched lengths, unsorted times or levels outside [0,1].
    void check() const;

    struct Level {
        double u;
        double baseline;
    };
    Level at(double t) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;
    std::vector<double> demands;
    double overshoot = 0.0;  // largest pre-clamp distance outside [0,1]
};

struct Ensemble {
    std::vector<double> times;
    std::vector<Trajectory> paths;
    std::uint64_t master_seed = 0;
    // Path i draws from the stream (master_seed, i).
};

struct SdeOptions {
    double dt = 0.0297;  // 0.01 C for the reference capacity
    double t_end = 59.4;
    std::size_t n_paths = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;
    std::size_t record_stride = 1;  // keep every n-th step (the last step is always kept)
};

/// Number of uniform steps of size dt needed to reach t_end.
std::size_t step_count(double dt, double t_end);

/// Classical RK4 on dx/dt = drift, levels frozen per step, state clamped to [0,1] after each step.
Trajectory integrate_ode(const FlexParams& p, double x0, const Schedule& sched, double dt, double t_end);

/// Euler-Maruyama paths with post-step clamping; reproducible for any thread count.
Ensemble simulate_sde(const FlexParams& p, double x0, const Schedule& sched, const SdeOptions& opt);

/// One Euler-Maruyama path (path index `path` of the ensemble keyed by `master_seed`).
Trajectory simulate_sde_path(const FlexParams& p, double x0, const Schedule& sched, double dt, double t_end,
                             std::uint64_t master_seed, std::uint64_t path, std::size_t record_stride = 1);

struct CrossSection {
    double mean = 0.0;
    double variance = 0.0;  // population variance
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;
    std::vector<double> histogram;  // probability mass per bin, bins partition [0,1]
};

/// Statistics across paths at recorded time index `k`.
CrossSection ensemble_stats(const Ensemble& e, std::size_t k, std::size_t bins = 100);

/// Statistics at the recorded time closest to t.
CrossSection ensemble_stats_at(const Ensemble& e, double t, std::size_t bins = 100);

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> sample, double q);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_ensemble_csv(std::ostream& os, const Ensemble& e);

}  // namespace flexfn
