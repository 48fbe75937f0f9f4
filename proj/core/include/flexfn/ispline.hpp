#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flexfn {

/// Monotone I-spline basis on [0,1].
///
/// Basis function i is the integral from 0 to u of the i-th M-spline (a B-spline
/// normalised to unit mass). Evaluation uses the identity that the integral of an
/// order-k M-spline is a tail sum of order-(k+1) B-splines on the knot vector with
/// each end knot repeated once more, so values at u=0 and u=1 are exact.
///
/// Indices are zero-based: 0 <= i < basis_count().
class ISplineBasis {
public:
    /// `knots` is the full clamped knot vector: 0 and 1 each repeated `order` times,
    /// interior knots strictly inside (0,1), nondecreasing.
    ISplineBasis(int order, std::vector<double> knots);

    /// Uniform interior knots sized to give `basis_count` functions.
    static ISplineBasis uniform(int order = 3, std::size_t basis_count = 7);

    int order() const noexcept { return order_; }
    std::span<const double> knots() const noexcept { return knots_; }
    std::size_t basis_count() const noexcept { return knots_.size() - static_cast<std::size_t>(order_); }

    double mspline(std::size_t i, double u) const;
    double ispline(std::size_t i, double u) const;

    /// All basis functions at u.
    std::vector<double> row(double u) const;

    friend bool operator==(const ISplineBasis&, const ISplineBasis&) = default;

private:
    void check_index(std::size_t i) const;

    int order_;
    std::vector<double> knots_;
    std::vector<double> extended_;  // knots_ with one more copy of each end knot
};

}  // namespace flexfn
