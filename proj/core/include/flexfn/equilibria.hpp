#pragma once

#include <string>
#include <vector>

#include "flexfn/certificate.hpp"
#include "flexfn/flex_model.hpp"

namespace flexfn {

enum class EquilibriumKind { Deterministic, StochasticBoundary };

struct EquilibriumPoint {
    double x_star = 0.0;
    double u_star = 0.0;
    EquilibriumKind kind = EquilibriumKind::Deterministic;
};

/// Unique state with f(x*) = -g(u*), by bisection on [0,1].
/// Throws AmbiguityError when f is not strictly decreasing.
EquilibriumPoint solve_equilibrium(const FlexParams& p, double u_star);

struct StochasticEquilibria {
    std::vector<EquilibriumPoint> points;  // always (0,1) and (1,0)
    bool verified = false;                 // drift and diffusion vanish at both
    bool noise_free = false;               // sigma_x == 0: the set collapses to the deterministic one
    std::vector<std::string> issues;
};

/// Points where both drift and diffusion vanish: (x,u) = (0,1) and (1,0).
StochasticEquilibria stochastic_equilibria(const FlexParams& p);

/// Grid check of dV/dt = (1/C) Delta D (x - x*) < 0 for V = (x-x*)^2/2.
/// Requires grid_n >= 100. States within 1e-6 of x* are skipped, as are states
/// whose demand branch is identically zero because B* is 0 or 1.
StabilityCertificate certify_deterministic(const FlexParams& p, double u_star, double b_star, int grid_n = 2001);

}  // namespace flexfn
