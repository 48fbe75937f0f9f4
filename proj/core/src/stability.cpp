#include "flexfn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flexfn/error.hpp"
#include "flexfn/params_json.hpp"

namespace flexfn {
namespace {

constexpr double kExcludedBall = 1e-6;

double boundary_state(double u_star) {
    if (u_star == 0.0) return 1.0;
    if (u_star == 1.0) return 0.0;
    throw std::domain_error("stochastic certificates need u* in {0,1}");
}

// Shared sampling loop: checks LV <= 0 on the grid points selected by `include`.
template <class Include>
StabilityCertificate sample_lv(const FlexParams& p, double u_star, double b_star, int grid_n, Include include) {
    if (grid_n < 100) throw ConfigError("certificate grid needs at least 100 points");
    const double x_star = boundary_state(u_star);
    StabilityCertificate cert;
    cert.params_hash = params_hash(p);
    cert.margin = -std::numeric_limits<double>::infinity();
    cert.region = {1.0, 0.0};
    for (int j = 0; j < grid_n; ++j) {
        const double x = static_cast<double>(j) / (grid_n - 1);
        if (std::abs(x - x_star) < kExcludedBall || !include(x, x_star)) continue;
        const double lv = lv_eval(p, x, u_star, b_star, x_star);
        ++cert.points_checked;
        cert.region.lo = std::min(cert.region.lo, x);
        cert.region.hi = std::max(cert.region.hi, x);
        cert.margin = std::max(cert.margin, lv);
        if (lv > 0.0) {
            if (!cert.failed_region) cert.failed_region = Interval{x, x};
            cert.failed_region->lo = std::min(cert.failed_region->lo, x);
            cert.failed_region->hi = std::max(cert.failed_region->hi, x);
        }
    }
    if (cert.points_checked == 0) {
        cert.degenerate = true;
        cert.margin = 0.0;
        cert.region = {x_star, x_star};
    }
    cert.pass = cert.margin <= 0.0;
    return cert;
}

}  // namespace

double lv_eval(const FlexParams& p, double x, double u_star, double b_star, double x_star) {
    const bool on_boundary_set = (x_star == 0.0 && u_star == 1.0) || (x_star == 1.0 && u_star == 0.0);
    if (!on_boundary_set) throw std::domain_error("(x*, u*) is not a stochastic equilibrium");
    const double demand_term = (demand(p, x, u_star, b_star) - b_star) * (x - x_star) / p.capacity;
    const double noise = x * (1.0 - x) * p.sigma_x;
    return demand_term + 0.5 * noise * noise;
}

double eta1(const FlexParams& p, double b_star) {
    if (!(b_star >= 0.0 && b_star <= 1.0)) throw std::domain_error("baseline outside [0,1]");
    return p.lambda / p.capacity * std::min(b_star, 1.0 - b_star);
}

StabilityCertificate boundedness_region(const FlexParams& p, double u_star, double b_star, int grid_n) {
    const double e1 = eta1(p, b_star);
    if (e1 == 0.0) throw ConfigError("eta1 = 0 (B* at 0 or 1): boundedness threshold undefined");
    const double threshold = p.sigma_x * p.sigma_x / (32.0 * e1);
    const double g = price_response(p, u_star);
    auto cert = sample_lv(p, u_star, b_star, grid_n, [&](double x, double x_star) {
        return std::abs(logistic_response(p, charge_response(p, x) + g)) * std::abs(x - x_star) >= threshold;
    });
    cert.claim = Claim::StochasticBounded;
    cert.threshold = threshold;
    return cert;
}

StabilityCertificate stability_radius(const FlexParams& p, double u_star, double b_star, double theta, int grid_n) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
    const double s2 = p.sigma_x * p.sigma_x;
    const double radius = s2 == 0.0 ? 1.0 : std::min(1.0, 2.0 * eta1(p, b_star) * theta / s2);
    auto cert = sample_lv(p, u_star, b_star, grid_n,
                          [&](double x, double x_star) { return std::abs(x - x_star) <= radius; });
    cert.claim = Claim::StochasticStable;
    cert.threshold = radius;
    return cert;
}

bool radius_certified(const FlexParams& p, double u_star, double b_star, double target_radius, double theta) {
    const auto cert = stability_radius(p, u_star, b_star, theta);
    return cert.pass && cert.threshold >= target_radius * (1.0 - 1e-12);
}

SigmaBound sigma_max(const FlexParams& p, double u_star, double b_star, double target_radius, double theta,
                     double cap) {
    const double e1 = eta1(p, b_star);
    if (e1 == 0.0) throw ConfigError("eta1 = 0 (B* at 0 or 1): no noise level yields a positive radius");
    if (!(target_radius <= 1.0)) throw ConfigError("target radius cannot exceed 1");
    auto holds = [&](double sigma) {
        FlexParams q = p;
        q.sigma_x = sigma;
        return radius_certified(q, u_star, b_star, target_radius, theta);
    };
    if (!holds(0.0)) return {0.0, false};
    if (target_radius <= 0.0 || holds(cap)) return {cap, true};

    // Radius formula alone admits sigma <= sqrt(2 eta1 theta / target).
    double lo = 0.0;
    double hi = std::min(cap, 2.0 * std::sqrt(2.0 * e1 * theta / target_radius));
    while (holds(hi) && hi < cap) {
        lo = hi;
        hi = std::min(cap, 2.0 * hi);
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
    }
    return {lo, false};
}

}  // namespace flexfn
