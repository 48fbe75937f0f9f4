#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace flexfn {

/// Scalar bilinear system x' = r1 x + r2 x w, in its deterministic, mean and Ito forms.
struct BilinearParams {
    double r1 = 1.0;
    double r2 = -1.2;
    double x0 = 1.0;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// Brownian increments on a uniform grid.
struct BrownianPath {
    double dt = 0.0;
    std::vector<double> increments;

    /// Path value W(t_i) at every grid point, starting with W(0) = 0.
    std::vector<double> cumulative() const;
    /// Sums consecutive groups of `factor` increments (coarser grid, same path).
    BrownianPath coarsen(std::size_t factor) const;
};

BrownianPath brownian_path(std::uint64_t seed, std::uint64_t stream, double dt, std::size_t steps);

/// RK4 on x' = r1 x + r2 x w(t) for a deterministic input w.
TimeSeries bilinear_ode(const BilinearParams& bp, const std::function<double(double)>& w, double dt, double t_end);

/// RK4 on the mean dynamics dE[x]/dt = (r1 + r2 omega) E[x].
TimeSeries bilinear_mean(const BilinearParams& bp, double omega, double dt, double t_end);

/// Exact solution of dx = r1 x dt + r2 x dW on the given path:
/// x(t) = x0 exp((r1 - r2^2/2) t + r2 W(t)).
TimeSeries gbm_exact(const BilinearParams& bp, const BrownianPath& path);

/// Euler-Maruyama on the same path.
TimeSeries gbm_euler_maruyama(const BilinearParams& bp, const BrownianPath& path);

struct ConvergenceRow {
    double dt;
    double strong_error;  // mean |x_EM(T) - x_exact(T)|
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;  // least-squares slope of log error against log dt
};

/// Strong error of Euler-Maruyama against the exact solution at t_end, all levels sharing
/// Brownian paths drawn at the finest dt. Every dt must divide t_end and be an integer
/// multiple of the finest one.
ConvergenceStudy em_convergence_study(const BilinearParams& bp, std::span<const double> dts, std::size_t n_paths,
                                      std::uint64_t master_seed, double t_end = 1.0, unsigned threads = 1);

/// Mean of log|x(T)| / T over exact paths; tends to r1 - r2^2/2.
double lyapunov_estimate(const BilinearParams& bp, double t_end, std::size_t n_paths, std::uint64_t master_seed,
                         double dt = 0.01);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace flexfn
