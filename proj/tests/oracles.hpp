#pragma once

// Test-only reference computations, written independently of the library code paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Normalised M-spline by the direct recursion on order (Ramsay 1988 form),
// with half-open support [t_i, t_{i+k}); knots is the full knot vector.
inline double mspline(const std::vector<double>& t, std::size_t i, int k, double x) {
    const double a = t[i], b = t[i + static_cast<std::size_t>(k)];
    if (b <= a) return 0.0;
    if (k == 1) return (x >= a && x < b) ? 1.0 / (b - a) : 0.0;
    const double left = (x - a) * mspline(t, i, k - 1, x);
    const double right = (b - x) * mspline(t, i + 1, k - 1, x);
    return k * (left + right) / ((k - 1) * (b - a));
}

// Piecewise Simpson over the knot spans so the integrand is smooth on each piece.
inline double ispline(const std::vector<double>& t, std::size_t i, int k, double u) {
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double a = t[j], b = std::min(t[j + 1], u);
        if (b <= a) continue;
        // Evaluate slightly inside the span to respect half-open supports.
        total += simpson([&](double x) { return mspline(t, i, k, std::min(x, std::nextafter(t[j + 1], a))); }, a, b,
                         200);
    }
    return total;
}

// Eigenvalues of a small dense real matrix are obtained in test files through Eigen.

}  // namespace oracle
