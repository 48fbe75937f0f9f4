#include "flexfn/tridiagonal.hpp"

#include <cmath>
#include <limits>

#include "flexfn/error.hpp"

namespace flexfn {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0), y(rhs.begin(), rhs.end());
    double denom = diag[0];
    if (denom == 0.0) throw NumericalError("singular tridiagonal system");
    c[0] = n > 1 ? upper[0] / denom : 0.0;
    y[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0 || !std::isfinite(denom)) throw NumericalError("singular tridiagonal system");
        c[i] = i + 1 < n ? upper[i] / denom : 0.0;
        y[i] = (y[i] - lower[i] * y[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) y[i] -= c[i] * y[i + 1];
    return y;
}

std::vector<double> solve_tridiagonal_pivoted(std::span<const double> lower, std::span<const double> diag,
                                              std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    // Row i of U holds d[i], u1[i] (col i+1), u2[i] (col i+2, fill-in from row swaps).
    std::vector<double> d(diag.begin(), diag.end()), u1(n, 0.0), u2(n, 0.0), b(rhs.begin(), rhs.end());
    std::vector<double> l(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) u1[i] = upper[i];
    for (std::size_t i = 1; i < n; ++i) l[i] = lower[i];

    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Candidate pivot rows: i (d[i], u1[i], u2[i]) and i+1 (l[i+1], d[i+1], u1[i+1]).
        if (std::abs(l[i + 1]) > std::abs(d[i])) {
            std::swap(d[i], l[i + 1]);
            std::swap(u1[i], d[i + 1]);
            std::swap(u2[i], u1[i + 1]);
            std::swap(b[i], b[i + 1]);
        }
        if (d[i] == 0.0) throw NumericalError("singular tridiagonal system");
        const double m = l[i + 1] / d[i];
        d[i + 1] -= m * u1[i];
        u1[i + 1] -= m * u2[i];
        b[i + 1] -= m * b[i];
        l[i + 1] = 0.0;
    }
    if (d[n - 1] == 0.0) {
        // Exactly singular: perturb so inverse iteration can still proceed.
        d[n - 1] = std::numeric_limits<double>::epsilon() * (std::abs(u1[n > 1 ? n - 2 : 0]) + 1.0);
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        if (i + 1 < n) s -= u1[i] * y[i + 1];
        if (i + 2 < n) s -= u2[i] * y[i + 2];
        y[i] = s / d[i];
    }
    return y;
}

std::size_t sturm_count_below(std::span<const double> diag, std::span<const double> offdiag_sq, double x) {
    constexpr double tiny = 1e-300;
    std::size_t count = 0;
    double q = diag[0] - x;
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        q = diag[i] - x - offdiag_sq[i - 1] / q;
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace flexfn
