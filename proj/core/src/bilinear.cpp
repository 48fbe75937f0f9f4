#include "flexfn/bilinear.hpp"

#include <algorithm>
#include <cmath>

#include "flexfn/error.hpp"
#include "flexfn/rng.hpp"
#include "flexfn/util.hpp"

namespace flexfn {
namespace {

TimeSeries rk4(double x0, double dt, double t_end, const std::function<double(double, double)>& rhs) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw ConfigError("need dt > 0 and t_end >= 0");
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    TimeSeries ts;
    ts.times.reserve(n + 1);
    ts.values.reserve(n + 1);
    double x = x0;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        ts.times.push_back(t);
        ts.values.push_back(x);
        if (i == n) break;
        const double k1 = rhs(t, x);
        const double k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
        const double k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
        const double k4 = rhs(t + dt, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return ts;
}

}  // namespace

std::vector<double> BrownianPath::cumulative() const {
    std::vector<double> w(increments.size() + 1, 0.0);
    for (std::size_t i = 0; i < increments.size(); ++i) w[i + 1] = w[i] + increments[i];
    return w;
}

BrownianPath BrownianPath::coarsen(std::size_t factor) const {
    if (factor == 0 || increments.size() % factor != 0) throw ConfigError("coarsening factor must divide the path");
    BrownianPath out{dt * static_cast<double>(factor), {}};
    out.increments.reserve(increments.size() / factor);
    for (std::size_t i = 0; i < increments.size(); i += factor) {
        double s = 0.0;
        for (std::size_t j = 0; j < factor; ++j) s += increments[i + j];
        out.increments.push_back(s);
    }
    return out;
}

BrownianPath brownian_path(std::uint64_t seed, std::uint64_t stream, double dt, std::size_t steps) {
    NormalStream rng(seed, stream);
    BrownianPath path{dt, std::vector<double>(steps)};
    const double sd = std::sqrt(dt);
    for (auto& dw : path.increments) dw = sd * rng.normal();
    return path;
}

TimeSeries bilinear_ode(const BilinearParams& bp, const std::function<double(double)>& w, double dt, double t_end) {
    return rk4(bp.x0, dt, t_end, [&](double t, double x) { return bp.r1 * x + bp.r2 * x * w(t); });
}

TimeSeries bilinear_mean(const BilinearParams& bp, double omega, double dt, double t_end) {
    const double rate = bp.r1 + bp.r2 * omega;
    return rk4(bp.x0, dt, t_end, [rate](double, double m) { return rate * m; });
}

TimeSeries gbm_exact(const BilinearParams& bp, const BrownianPath& path) {
    const auto w = path.cumulative();
    TimeSeries ts;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double t = static_cast<double>(i) * path.dt;
        ts.times.push_back(t);
        ts.values.push_back(bp.x0 * std::exp((bp.r1 - 0.5 * bp.r2 * bp.r2) * t + bp.r2 * w[i]));
    }
    return ts;
}

TimeSeries gbm_euler_maruyama(const BilinearParams& bp, const BrownianPath& path) {
    TimeSeries ts;
    double x = bp.x0;
    ts.times.push_back(0.0);
    ts.values.push_back(x);
    for (std::size_t i = 0; i < path.increments.size(); ++i) {
        x += bp.r1 * x * path.dt + bp.r2 * x * path.increments[i];
        ts.times.push_back(static_cast<double>(i + 1) * path.dt);
        ts.values.push_back(x);
    }
    return ts;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy em_convergence_study(const BilinearParams& bp, std::span<const double> dts, std::size_t n_paths,
                                      std::uint64_t master_seed, double t_end, unsigned threads) {
    if (dts.size() < 2) throw ConfigError("need at least two step sizes to fit a convergence slope");
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    const double finest = *std::min_element(dts.begin(), dts.end());
    const auto fine_steps = static_cast<std::size_t>(std::llround(t_end / finest));
    if (std::abs(static_cast<double>(fine_steps) * finest - t_end) > 1e-9 * t_end) {
        throw ConfigError("finest dt must divide t_end");
    }
    std::vector<std::size_t> factors;
    for (double dt : dts) {
        const auto f = static_cast<std::size_t>(std::llround(dt / finest));
        if (f == 0 || std::abs(static_cast<double>(f) * finest - dt) > 1e-9 * dt || fine_steps % f != 0) {
            throw ConfigError("every dt must be an integer multiple of the finest dt and divide t_end");
        }
        factors.push_back(f);
    }

    // errors[path][level]
    std::vector<std::vector<double>> errors(n_paths, std::vector<double>(dts.size()));
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto fine = brownian_path(master_seed, i, finest, fine_steps);
        const double exact = gbm_exact(bp, fine).values.back();
        for (std::size_t l = 0; l < dts.size(); ++l) {
            const auto coarse = fine.coarsen(factors[l]);
            errors[i][l] = std::abs(gbm_euler_maruyama(bp, coarse).values.back() - exact);
        }
    });

    ConvergenceStudy study;
    std::vector<double> xs, ys;
    for (std::size_t l = 0; l < dts.size(); ++l) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) sum += errors[i][l];
        study.rows.push_back({dts[l], sum / static_cast<double>(n_paths)});
        xs.push_back(dts[l]);
        ys.push_back(study.rows.back().strong_error);
    }
    study.slope = loglog_slope(xs, ys);
    return study;
}

double lyapunov_estimate(const BilinearParams& bp, double t_end, std::size_t n_paths, std::uint64_t master_seed,
                         double dt) {
    if (bp.x0 == 0.0) throw ConfigError("x0 must be nonzero");
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    double sum = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const auto path = brownian_path(master_seed, i, dt, steps);
        // log|x(T)| directly: the exponent, avoiding overflow of x itself.
        const double w = path.cumulative().back();
        const double t = static_cast<double>(steps) * dt;
        sum += (std::log(std::abs(bp.x0)) + (bp.r1 - 0.5 * bp.r2 * bp.r2) * t + bp.r2 * w) / t;
    }
    return sum / static_cast<double>(n_paths);
}

}  // namespace flexfn
