#pragma once

#include <span>
#include <vector>

namespace flexfn {

/// Solves A y = rhs for tridiagonal A (lower[0] and upper[n-1] are ignored).
/// Thomas elimination without pivoting; intended for diagonally dominant systems.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// Same system solved by Gaussian elimination with partial pivoting (safe near singularity).
std::vector<double> solve_tridiagonal_pivoted(std::span<const double> lower, std::span<const double> diag,
                                              std::span<const double> upper, std::span<const double> rhs);

/// Number of eigenvalues below x of the symmetric tridiagonal matrix with the given
/// diagonal and squared off-diagonal entries (Sturm sequence).
std::size_t sturm_count_below(std::span<const double> diag, std::span<const double> offdiag_sq, double x);

}  // namespace flexfn
