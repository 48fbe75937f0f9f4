#include "flexfn/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexfn/error.hpp"
#include "flexfn/params_json.hpp"

namespace flexfn {
namespace {

constexpr double kResidualTol = 1e-12;
constexpr double kIntervalTol = 1e-14;
constexpr double kExcludedBall = 1e-6;

void require_strictly_decreasing_f(const FlexParams& p) {
    constexpr int n = 1000;
    double prev = charge_response(p, 0.0);
    for (int j = 1; j <= n; ++j) {
        const double f = charge_response(p, static_cast<double>(j) / n);
        if (!(f < prev)) throw AmbiguityError("f is not strictly decreasing; equilibrium is not unique");
        prev = f;
    }
}

}  // namespace

EquilibriumPoint solve_equilibrium(const FlexParams& p, double u_star) {
    require_strictly_decreasing_f(p);
    const double g = price_response(p, u_star);
    auto residual = [&](double x) { return charge_response(p, x) + g; };

    EquilibriumPoint eq{0.0, u_star, EquilibriumKind::Deterministic};
    double lo = 0.0, hi = 1.0;
    const double r_lo = residual(lo), r_hi = residual(hi);
    if (std::abs(r_lo) < kResidualTol) return eq;
    if (std::abs(r_hi) < kResidualTol) {
        eq.x_star = 1.0;
        return eq;
    }
    if (r_lo < 0.0 || r_hi > 0.0) {
        throw NumericalError("f(x) + g(u*) does not change sign on [0,1]; check f(0)+g(u) >= 0 >= f(1)+g(u)");
    }
    double mid = 0.5;
    while (hi - lo > kIntervalTol) {
        mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (std::abs(r) < kResidualTol) break;
        (r > 0.0 ? lo : hi) = mid;
    }
    eq.x_star = mid;
    return eq;
}

StochasticEquilibria stochastic_equilibria(const FlexParams& p) {
    StochasticEquilibria out;
    out.points = {{0.0, 1.0, EquilibriumKind::StochasticBoundary}, {1.0, 0.0, EquilibriumKind::StochasticBoundary}};
    out.noise_free = p.sigma_x == 0.0;
    out.verified = true;
    for (const auto& e : out.points) {
        // The drift must vanish for every baseline, so probe both demand branches.
        for (double b : {0.25, 0.5, 0.75}) {
            const double a = drift(p, e.x_star, e.u_star, b);
            if (!(std::abs(a) < 1e-12)) {
                out.verified = false;
                out.issues.push_back("drift " + std::to_string(a) + " != 0 at (x,u)=(" + std::to_string(e.x_star) +
                                     "," + std::to_string(e.u_star) + "), B=" + std::to_string(b));
                break;
            }
        }
        if (diffusion(p, e.x_star) != 0.0) {
            out.verified = false;
            out.issues.push_back("diffusion != 0 at x=" + std::to_string(e.x_star));
        }
    }
    if (out.noise_free) out.issues.push_back("sigma_x = 0: stochastic equilibria reduce to the deterministic set");
    return out;
}

StabilityCertificate certify_deterministic(const FlexParams& p, double u_star, double b_star, int grid_n) {
    if (grid_n < 100) throw ConfigError("certificate grid needs at least 100 points");
    if (!(b_star >= 0.0 && b_star <= 1.0)) throw std::domain_error("baseline outside [0,1]");
    const double x_star = solve_equilibrium(p, u_star).x_star;

    StabilityCertificate cert;
    cert.claim = Claim::DeterministicAsymptotic;
    cert.params_hash = params_hash(p);
    cert.margin = -std::numeric_limits<double>::infinity();
    cert.region = {1.0, 0.0};

    bool any = false;
    for (int j = 0; j < grid_n; ++j) {
        const double x = static_cast<double>(j) / (grid_n - 1);
        if (std::abs(x - x_star) < kExcludedBall) continue;
        const double delta = demand_change(p, x, u_star);
        // Remark-3 combinations: the demand branch is identically zero there.
        if ((b_star == 0.0 && delta < 0.0) || (b_star == 1.0 && delta >= 0.0)) continue;
        const double vdot = demand_deviation(p, delta, b_star) * (x - x_star) / p.capacity;
        any = true;
        ++cert.points_checked;
        cert.region.lo = std::min(cert.region.lo, x);
        cert.region.hi = std::max(cert.region.hi, x);
        cert.margin = std::max(cert.margin, vdot);
        if (!(vdot < 0.0)) {
            if (!cert.failed_region) cert.failed_region = Interval{x, x};
            cert.failed_region->lo = std::min(cert.failed_region->lo, x);
            cert.failed_region->hi = std::max(cert.failed_region->hi, x);
        }
    }
    if (!any) {
        cert.degenerate = true;
        cert.margin = 0.0;
        cert.region = {x_star, x_star};
        cert.pass = true;
        return cert;
    }
    cert.pass = cert.margin < 0.0;
    cert.threshold = 0.0;
    return cert;
}

}  // namespace flexfn
