#pragma once

#include "flexfn/certificate.hpp"
#include "flexfn/flex_model.hpp"

namespace flexfn {

/// Default number of uniform sample points for stochastic certificates.
inline constexpr int kCertificateGrid = 2001;

/// Generator applied to V(x) = (x - x*)^2 / 2:
///   LV = (D - B)(x - x*)/C + x^2 (1-x)^2 sigma_x^2 / 2.
/// (x*, u*) must be one of the boundary equilibria (0,1) or (1,0); otherwise std::domain_error.
double lv_eval(const FlexParams& p, double x, double u_star, double b_star, double x_star);

/// eta1 = (lambda / C) min(B*, 1 - B*); zero for B* in {0,1}.
double eta1(const FlexParams& p, double b_star);

/// LV <= 0 wherever |l(f(x)+g(u*))| |x - x*| >= sigma_x^2 / (32 eta1).
/// u* must be 0 or 1. Throws ConfigError when eta1 == 0.
StabilityCertificate boundedness_region(const FlexParams& p, double u_star, double b_star,
                                        int grid_n = kCertificateGrid);

/// LV <= 0 for 0 < |x - x*| <= r, r = min(1, 2 eta1 theta / sigma_x^2); threshold holds r.
StabilityCertificate stability_radius(const FlexParams& p, double u_star, double b_star, double theta = 0.5,
                                      int grid_n = kCertificateGrid);

struct SigmaBound {
    double sigma = 0.0;
    bool capped = false;  // the predicate still held at the search cap
};

/// Largest sigma_x for which stability_radius passes with radius >= target_radius.
SigmaBound sigma_max(const FlexParams& p, double u_star, double b_star, double target_radius, double theta = 0.5,
                     double cap = 1e6);

/// True when stability_radius passes and its radius reaches target_radius.
bool radius_certified(const FlexParams& p, double u_star, double b_star, double target_radius, double theta);

}  // namespace flexfn
