#include "flexfn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "flexfn/error.hpp"
#include "flexfn/rng.hpp"
#include "flexfn/util.hpp"

namespace flexfn {
namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

double outside_unit(double x) { return x < 0.0 ? -x : (x > 1.0 ? x - 1.0 : 0.0); }

void check_run(double x0, double dt, double t_end) {
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw ConfigError("initial state outside [0,1]");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
    if (!(t_end >= dt) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= dt");
}

[[noreturn]] void non_finite(double t, double x) {
    std::ostringstream os;
    os << "non-finite state at t=" << t << " (previous state " << x << ")";
    throw NumericalError(os.str());
}

}  // namespace

Schedule Schedule::constant(double u, double baseline) { return Schedule{{0.0}, {u}, {baseline}}; }

void Schedule::check() const {
    if (breakpoints.empty()) throw ConfigError("schedule needs at least one level");
    if (u_values.size() != breakpoints.size() || b_values.size() != breakpoints.size()) {
        throw ConfigError("schedule breakpoints, u_values and B_values must have equal lengths");
    }
    for (std::size_t j = 1; j < breakpoints.size(); ++j) {
        if (!(breakpoints[j] > breakpoints[j - 1])) throw ConfigError("schedule times must be strictly increasing");
    }
    for (std::size_t j = 0; j < breakpoints.size(); ++j) {
        if (!(u_values[j] >= 0.0 && u_values[j] <= 1.0) || !(b_values[j] >= 0.0 && b_values[j] <= 1.0)) {
            throw ConfigError("schedule levels must lie in [0,1]");
        }
    }
}

Schedule::Level Schedule::at(double t) const {
    const double slack = 1e-9 * std::max(1.0, std::abs(t));
    std::size_t j = 0;
    while (j + 1 < breakpoints.size() && breakpoints[j + 1] <= t + slack) ++j;
    return {u_values[j], b_values[j]};
}

std::size_t step_count(double dt, double t_end) {
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

Trajectory integrate_ode(const FlexParams& p, double x0, const Schedule& sched, double dt, double t_end) {
    require_valid(p);
    sched.check();
    check_run(x0, dt, t_end);
    const std::size_t n = step_count(dt, t_end);

    Trajectory tr;
    tr.times.reserve(n + 1);
    tr.states.reserve(n + 1);
    tr.demands.reserve(n + 1);
    double x = x0;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        const auto lvl = sched.at(t);
        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.demands.push_back(demand(p, x, lvl.u, lvl.baseline));
        if (i == n) break;

        // RK4 stages may step slightly outside [0,1]; the field is only defined inside.
        auto a = [&](double y) { return drift(p, clamp_unit(y), lvl.u, lvl.baseline); };
        const double k1 = a(x);
        const double k2 = a(x + 0.5 * dt * k1);
        const double k3 = a(x + 0.5 * dt * k2);
        const double k4 = a(x + dt * k3);
        const double next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next)) non_finite(t + dt, x);
        tr.overshoot = std::max(tr.overshoot, outside_unit(next));
        x = clamp_unit(next);
    }
    return tr;
}

Trajectory simulate_sde_path(const FlexParams& p, double x0, const Schedule& sched, double dt, double t_end,
                             std::uint64_t master_seed, std::uint64_t path, std::size_t record_stride) {
    const std::size_t n = step_count(dt, t_end);
    const std::size_t stride = std::max<std::size_t>(1, record_stride);
    NormalStream noise(master_seed, path);
    const double sqrt_dt = std::sqrt(dt);

    Trajectory tr;
    const std::size_t kept = n / stride + 2;
    tr.times.reserve(kept);
    tr.states.reserve(kept);
    tr.demands.reserve(kept);
    double x = x0;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        const auto lvl = sched.at(t);
        if (i % stride == 0 || i == n) {
            tr.times.push_back(t);
            tr.states.push_back(x);
            tr.demands.push_back(demand(p, x, lvl.u, lvl.baseline));
        }
        if (i == n) break;
        const double xi = noise.normal();
        const double next = x + drift(p, x, lvl.u, lvl.baseline) * dt + diffusion(p, x) * sqrt_dt * xi;
        if (!std::isfinite(next)) non_finite(t + dt, x);
        tr.overshoot = std::max(tr.overshoot, outside_unit(next));
        x = clamp_unit(next);
    }
    return tr;
}

Ensemble simulate_sde(const FlexParams& p, double x0, const Schedule& sched, const SdeOptions& opt) {
    require_valid(p);
    sched.check();
    check_run(x0, opt.dt, opt.t_end);
    if (opt.n_paths < 1) throw ConfigError("n_paths must be >= 1");

    Ensemble e;
    e.master_seed = opt.master_seed;
    e.paths.resize(opt.n_paths);
    parallel_for(opt.n_paths, opt.threads, [&](std::size_t i) {
        e.paths[i] = simulate_sde_path(p, x0, sched, opt.dt, opt.t_end, opt.master_seed, i, opt.record_stride);
    });
    e.times = e.paths.front().times;
    return e;
}

double quantile(std::vector<double> sample, double q) {
    if (sample.empty()) throw ConfigError("quantile of empty sample");
    std::sort(sample.begin(), sample.end());
    const double pos = q * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return sample[lo] + w * (sample[hi] - sample[lo]);
}

CrossSection ensemble_stats(const Ensemble& e, std::size_t k, std::size_t bins) {
    if (e.paths.empty()) throw ConfigError("empty ensemble");
    if (k >= e.times.size()) throw std::out_of_range("time index out of range");
    if (bins < 1) throw ConfigError("histogram needs at least one bin");

    std::vector<double> values;
    values.reserve(e.paths.size());
    for (const auto& path : e.paths) values.push_back(path.states[k]);

    CrossSection cs;
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    cs.mean = sum / n;
    // shifted by the first sample so identical paths give exactly zero
    double s1 = 0.0, s2 = 0.0;
    for (double v : values) {
        s1 += v - values.front();
        s2 += (v - values.front()) * (v - values.front());
    }
    cs.variance = std::max(0.0, (s2 - s1 * s1 / n) / n);

    cs.histogram.assign(bins, 0.0);
    for (double v : values) {
        const auto b = std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
        cs.histogram[b] += 1.0 / n;
    }
    std::sort(values.begin(), values.end());
    cs.q05 = quantile(values, 0.05);
    cs.q50 = quantile(values, 0.50);
    cs.q95 = quantile(values, 0.95);
    return cs;
}

CrossSection ensemble_stats_at(const Ensemble& e, double t, std::size_t bins) {
    if (e.times.empty()) throw ConfigError("empty ensemble");
    std::size_t best = 0;
    for (std::size_t k = 1; k < e.times.size(); ++k) {
        if (std::abs(e.times[k] - t) < std::abs(e.times[best] - t)) best = k;
    }
    return ensemble_stats(e, best, bins);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,x,d\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        os << format_double(tr.times[i]) << ',' << format_double(tr.states[i]) << ',' << format_double(tr.demands[i])
           << '\n';
    }
}

void write_ensemble_csv(std::ostream& os, const Ensemble& e) {
    os << "t,mean,var,q05,q50,q95\n";
    for (std::size_t k = 0; k < e.times.size(); ++k) {
        const auto cs = ensemble_stats(e, k, 1);
        os << format_double(e.times[k]) << ',' << format_double(cs.mean) << ',' << format_double(cs.variance) << ','
           << format_double(cs.q05) << ',' << format_double(cs.q50) << ',' << format_double(cs.q95) << '\n';
    }
}

}  // namespace flexfn
