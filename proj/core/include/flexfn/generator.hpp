#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "flexfn/flex_model.hpp"

namespace flexfn {

/// Uniform partition of [0,1] into n_cells finite volumes.
class StateGrid {
public:
    explicit StateGrid(std::size_t n_cells = 200);

    std::size_t size() const noexcept { return n_; }
    double width() const noexcept { return 1.0 / static_cast<double>(n_); }
    double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * width(); }
    /// Edge i sits at i/n, i in [0, n].
    double edge(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(n_); }
    /// Cell containing x (x = 1 belongs to the last cell).
    std::size_t cell_of(double x) const noexcept;

private:
    std::size_t n_;
};

/// Rate matrix of the birth-death chain on the grid cells.
/// Row i: super[i] = rate i -> i+1, sub[i] = rate i -> i-1, diag[i] = -(super[i] + sub[i]).
struct GeneratorMatrix {
    StateGrid grid;
    std::vector<double> sub, diag, super;

    std::size_t size() const noexcept { return diag.size(); }
    /// Dense row-major copy, for small-grid checks.
    std::vector<double> dense() const;
};

/// 1-D diffusion dX = a(X) dt + b(X) dW written as a conservative flux
/// J = a p - d/dx (D p) with D = b^2/2.
struct DiffusionField {
    std::function<double(double)> drift;              // a(x)
    std::function<double(double)> diffusivity;        // D(x)
    std::function<double(double)> diffusivity_slope;  // D'(x)
};

/// Exponentially fitted (Chang-Cooper / Scharfetter-Gummel) finite-volume rates with
/// zero-flux boundaries.
GeneratorMatrix build_generator(const DiffusionField& field, const StateGrid& grid);

/// Generator of the flexibility SDE at fixed price u and baseline B. Throws ConfigError for n_cells < 16.
GeneratorMatrix build_generator(const FlexParams& p, double u, double baseline, const StateGrid& grid);

/// Two-state chain with rates up (0 -> 1) and down (1 -> 0); used for closed-form checks.
GeneratorMatrix two_state_generator(double up, double down);

struct DistributionSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> pdfs;  // probability mass per cell
};

/// Probability vector with all mass in the cell containing x.
std::vector<double> point_mass(const StateGrid& grid, double x);

/// Solves dp/dt = G^T p with implicit Euler steps of at most max_dt between output times.
DistributionSeries evolve_pdf(const GeneratorMatrix& g, std::span<const double> p0, std::span<const double> times,
                              double max_dt = 0.01);

/// Running sums of each pdf in the series.
std::vector<std::vector<double>> cdf_series(const DistributionSeries& ds);

struct StationaryDistribution {
    std::vector<double> pdf;
    bool connected = true;  // false when several closed classes exist; mass then split equally
    std::size_t closed_classes = 1;
};

/// pi G = 0 via zero net flux across every edge.
StationaryDistribution stationary_pdf(const GeneratorMatrix& g);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments moments(const StateGrid& grid, std::span<const double> pdf);
Moments stationary_moments(const GeneratorMatrix& g);

/// Sums groups of consecutive cells into `bins` bins; bins must divide the pdf length.
std::vector<double> coarsen_pdf(std::span<const double> pdf, std::size_t bins);

/// Half the L1 distance between two probability vectors.
double total_variation(std::span<const double> a, std::span<const double> b);

enum class EigenMode { Slowest, Fastest };

/// Slowest: nonzero eigenvalue closest to zero. Fastest: most negative eigenvalue.
/// Requires a single closed class. Relative accuracy 1e-8.
double spectral_gap(const GeneratorMatrix& g, EigenMode mode = EigenMode::Slowest);

}  // namespace flexfn
