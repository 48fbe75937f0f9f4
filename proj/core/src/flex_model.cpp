#include "flexfn/flex_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flexfn/error.hpp"

namespace flexfn {
namespace {

constexpr int kMonotoneGrid = 1000;  // 1e-3 spacing

void check_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << what << " outside [0,1]: " << v;
        throw std::domain_error(os.str());
    }
}

}  // namespace

FlexParams FlexParams::reference() { return FlexParams{}; }

FlexParams FlexParams::linear_reference() {
    FlexParams p;
    p.alpha = {0.0, 1.0, 0.0, 0.0};
    return p;
}

double charge_response(const FlexParams& p, double x) {
    check_unit(x, "state of charge");
    const double s = 2.0 * x - 1.0;
    const double s2 = s * s;
    const double shape = 1.0 - 2.0 * x + p.alpha[0] * (1.0 - s2);
    const double scale = p.alpha[1] + p.alpha[2] * s2 + p.alpha[3] * s2 * s2 * s2;
    return shape * scale;
}

double price_response(const FlexParams& p, double u) {
    check_unit(u, "price");
    const auto row = p.basis.row(u);
    double g = p.g0;
    for (std::size_t i = 0; i < row.size() && i < p.beta.size(); ++i) g += p.beta[i] * row[i];
    return g;
}

double logistic_response(const FlexParams& p, double z) { return std::tanh(0.5 * p.steepness * z); }

double demand_change(const FlexParams& p, double x, double u) {
    return logistic_response(p, charge_response(p, x) + price_response(p, u));
}

double demand_deviation(const FlexParams& p, double delta, double baseline) {
    return delta >= 0.0 ? delta * p.lambda * (1.0 - baseline) : delta * p.lambda * baseline;
}

double demand(const FlexParams& p, double x, double u, double baseline) {
    check_unit(baseline, "baseline");
    return baseline + demand_deviation(p, demand_change(p, x, u), baseline);
}

double drift(const FlexParams& p, double x, double u, double baseline) {
    check_unit(baseline, "baseline");
    return demand_deviation(p, demand_change(p, x, u), baseline) / p.capacity;
}

double diffusion(const FlexParams& p, double x) {
    check_unit(x, "state of charge");
    return x * (1.0 - x) * p.sigma_x;
}

ValidationReport validate(const FlexParams& p) {
    ValidationReport r;
    auto error = [&](std::string s) { r.errors.push_back(std::move(s)); };

    if (!(p.capacity > 0.0) || !std::isfinite(p.capacity)) error("C must be > 0");
    if (!(p.lambda > 0.0 && p.lambda <= 1.0)) {
        error("lambda must lie in (0,1)");
    } else if (p.lambda == 1.0) {
        r.warnings.push_back("lambda = 1 sits on the boundary of (0,1); accepted for reproduction runs");
    }
    if (!(p.steepness > 0.0) || !std::isfinite(p.steepness)) error("k must be > 0");
    if (!(p.sigma_x >= 0.0) || !std::isfinite(p.sigma_x)) error("sigma_x must be >= 0");

    if (std::abs(p.alpha[1] + p.alpha[2] + p.alpha[3] - 1.0) >= 1e-9) {
        error("alpha2+alpha3+alpha4 != 1 (needed for f(0)=1, f(1)=-1)");
    }

    const bool beta_sized = p.beta.size() == p.basis.basis_count();
    if (!beta_sized) {
        error("beta has " + std::to_string(p.beta.size()) + " entries, basis has " +
              std::to_string(p.basis.basis_count()));
    }
    if (std::abs(p.g0 - 1.0) >= 1e-12) error("g0 must be 1 (g(0)=1)");
    const double beta_sum = std::accumulate(p.beta.begin(), p.beta.end(), 0.0);
    if (std::abs(p.g0 + beta_sum + 1.0) >= 1e-9) error("g0 + sum(beta) != -1 (needed for g(1)=-1)");

    bool f_monotone = true;
    double f_prev = charge_response(p, 0.0);
    for (int j = 1; j <= kMonotoneGrid; ++j) {
        const double f = charge_response(p, static_cast<double>(j) / kMonotoneGrid);
        if (!(f < f_prev)) f_monotone = false;
        f_prev = f;
    }
    if (!f_monotone) error("f not monotone decreasing");

    bool g_nonincreasing = std::all_of(p.beta.begin(), p.beta.end(), [](double b) { return b <= 0.0; });
    bool g_strict = true;
    if (beta_sized) {
        double g_prev = price_response(p, 0.0);
        for (int j = 1; j <= kMonotoneGrid; ++j) {
            const double g = price_response(p, static_cast<double>(j) / kMonotoneGrid);
            if (g > g_prev + 1e-12) g_nonincreasing = false;
            if (!(g < g_prev)) g_strict = false;
            g_prev = g;
        }
    }
    if (!g_nonincreasing) {
        error("g not monotone decreasing (every beta_i must be <= 0)");
    } else if (beta_sized && !g_strict) {
        r.warnings.push_back("g has flat segments: the equilibrium price u* is not unique for some states");
    }
    return r;
}

void require_valid(const FlexParams& p) {
    const auto r = validate(p);
    if (r.ok()) return;
    std::string msg = "invalid parameters:";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ConfigError(msg);
}

}  // namespace flexfn
