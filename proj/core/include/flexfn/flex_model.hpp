#pragma once

#include <array>
#include <string>
#include <vector>

#include "flexfn/ispline.hpp"

namespace flexfn {

/// Constants of the price-to-demand flexibility model.
///
/// The state of charge x and the normalised price u live in [0,1]. The response
/// curves are
///   f(x) = (1 - 2x + a1 (1 - (2x-1)^2)) (a2 + a3 (2x-1)^2 + a4 (2x-1)^6)
///   g(u) = g0 + sum_i beta_i I_i(u)
/// and the demand change is the logistic l(f(x) + g(u)).
struct FlexParams {
    double capacity = 2.97;  // C, flexible energy capacity
    double lambda = 1.0;     // portion of demand that can shift
    double steepness = 6.0;  // k, logistic steepness
    std::array<double, 4> alpha{0.5, 1.0, 0.0, 0.0};
    std::vector<double> beta = std::vector<double>(7, -2.0 / 7.0);
    double g0 = 1.0;
    double sigma_x = 0.1;
    ISplineBasis basis = ISplineBasis::uniform(3, 7);

    /// Default reproduction parameters: f(x) = 1 - 2x^2, uniform beta, C=2.97, sigma_x=0.1, lambda=1.
    static FlexParams reference();
    /// Same as reference() but with the linear charge response f(x) = 1 - 2x.
    static FlexParams linear_reference();

    friend bool operator==(const FlexParams&, const FlexParams&) = default;
};

/// Outcome of parameter validation; every violated constraint is listed.
struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const noexcept { return errors.empty(); }
};

ValidationReport validate(const FlexParams& p);

/// Throws ConfigError listing all violations if `p` is invalid.
void require_valid(const FlexParams& p);

// f: response to the state of charge. Throws std::domain_error outside [0,1].
double charge_response(const FlexParams& p, double x);

// g: response to the price. Throws std::domain_error outside [0,1].
double price_response(const FlexParams& p, double u);

// l(z) = -1 + 2/(1+exp(-k z)), evaluated as tanh(k z / 2) so it is exactly odd.
double logistic_response(const FlexParams& p, double z);

// delta = l(f(x) + g(u)).
double demand_change(const FlexParams& p, double x, double u);

// Delta D: delta*lambda*(1-B) for delta >= 0, delta*lambda*B otherwise.
double demand_deviation(const FlexParams& p, double delta, double baseline);

// D = B + Delta D.
double demand(const FlexParams& p, double x, double u, double baseline);

// Drift of the state of charge, Delta D / C.
double drift(const FlexParams& p, double x, double u, double baseline);

// Diffusion amplitude x (1-x) sigma_x.
double diffusion(const FlexParams& p, double x);

}  // namespace flexfn
