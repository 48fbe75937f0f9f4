#include "flexfn/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "flexfn/error.hpp"
#include "flexfn/tridiagonal.hpp"

namespace flexfn {
namespace {

// Beyond this Peclet number the reverse rate is below ~1e-258 of the forward one and the
// edge is treated as one-way.
constexpr double kMaxPeclet = 600.0;

// B(z) = z / (e^z - 1).
double bernoulli(double z) {
    if (std::abs(z) < 1e-10) return 1.0 - 0.5 * z;
    return z / std::expm1(z);
}

struct Segment {
    std::size_t lo, hi;  // inclusive cell range
};

// Maximal runs of cells joined by two-way edges that have no outgoing rate.
std::vector<Segment> closed_classes(const GeneratorMatrix& g) {
    const std::size_t n = g.size();
    std::vector<Segment> out;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool linked = i + 1 < n && g.super[i] > 0.0 && g.sub[i + 1] > 0.0;
        if (linked) continue;
        const bool closed = g.sub[lo] == 0.0 && g.super[i] == 0.0;
        if (closed) out.push_back({lo, i});
        lo = i + 1;
    }
    return out;
}

void check_pdf(const StateGrid& grid, std::span<const double> p) {
    if (p.size() != grid.size()) throw ConfigError("pdf length does not match the grid");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= -1e-12)) throw ConfigError("pdf has negative entries");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("pdf does not sum to 1");
}

}  // namespace

StateGrid::StateGrid(std::size_t n_cells) : n_(n_cells) {
    if (n_cells < 2) throw ConfigError("state grid needs at least 2 cells");
}

std::size_t StateGrid::cell_of(double x) const noexcept {
    const auto i = static_cast<std::size_t>(std::max(0.0, x) * static_cast<double>(n_));
    return std::min(i, n_ - 1);
}

std::vector<double> GeneratorMatrix::dense() const {
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = diag[i];
        if (i > 0) m[i * n + i - 1] = sub[i];
        if (i + 1 < n) m[i * n + i + 1] = super[i];
    }
    return m;
}

GeneratorMatrix build_generator(const DiffusionField& field, const StateGrid& grid) {
    const std::size_t n = grid.size();
    const double h = grid.width();
    GeneratorMatrix g{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t e = 1; e < n; ++e) {
        const double x = grid.edge(e);
        const double diff = field.diffusivity(x);
        const double velocity = field.drift(x) - field.diffusivity_slope(x);
        if (!std::isfinite(diff) || !std::isfinite(velocity) || diff < 0.0) {
            throw NumericalError("non-finite or negative coefficients at x=" + std::to_string(x));
        }
        double up = 0.0, down = 0.0;
        const double peclet = diff > 0.0 ? velocity * h / diff : std::numeric_limits<double>::infinity();
        if (diff > 0.0 && std::abs(peclet) < kMaxPeclet) {
            up = diff / (h * h) * bernoulli(-peclet);
            down = diff / (h * h) * bernoulli(peclet);
        } else {
            up = std::max(velocity, 0.0) / h;
            down = std::max(-velocity, 0.0) / h;
        }
        g.super[e - 1] = up;
        g.sub[e] = down;
    }
    for (std::size_t i = 0; i < n; ++i) g.diag[i] = -(g.super[i] + g.sub[i]);
    return g;
}

GeneratorMatrix build_generator(const FlexParams& p, double u, double baseline, const StateGrid& grid) {
    if (grid.size() < 16) throw ConfigError("generator grid needs at least 16 cells");
    require_valid(p);
    const double s2 = p.sigma_x * p.sigma_x;
    DiffusionField field{
        [&](double x) { return drift(p, x, u, baseline); },
        [s2](double x) { return 0.5 * s2 * x * x * (1.0 - x) * (1.0 - x); },
        [s2](double x) { return s2 * x * (1.0 - x) * (1.0 - 2.0 * x); },
    };
    return build_generator(field, grid);
}

GeneratorMatrix two_state_generator(double up, double down) {
    GeneratorMatrix g{StateGrid(2), {0.0, down}, {-up, -down}, {up, 0.0}};
    return g;
}

std::vector<double> point_mass(const StateGrid& grid, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("initial state outside [0,1]");
    std::vector<double> p(grid.size(), 0.0);
    p[grid.cell_of(x)] = 1.0;
    return p;
}

DistributionSeries evolve_pdf(const GeneratorMatrix& g, std::span<const double> p0, std::span<const double> times,
                              double max_dt) {
    check_pdf(g.grid, p0);
    if (!(max_dt > 0.0)) throw ConfigError("max_dt must be > 0");
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (!(times[j] >= 0.0) || (j > 0 && times[j] < times[j - 1])) {
            throw ConfigError("output times must be nonnegative and nondecreasing");
        }
    }
    const std::size_t n = g.size();
    DistributionSeries ds;
    std::vector<double> p(p0.begin(), p0.end());
    std::vector<double> lower(n), diag(n), upper(n);
    double t = 0.0;
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(span / max_dt - 1e-12));
            const double dt = span / static_cast<double>(steps);
            // (I - dt G^T) p_next = p
            for (std::size_t i = 0; i < n; ++i) {
                diag[i] = 1.0 - dt * g.diag[i];
                lower[i] = i > 0 ? -dt * g.super[i - 1] : 0.0;
                upper[i] = i + 1 < n ? -dt * g.sub[i + 1] : 0.0;
            }
            for (std::size_t s = 0; s < steps; ++s) p = solve_tridiagonal(lower, diag, upper, p);
            t = target;
        }
        ds.times.push_back(target);
        ds.pdfs.push_back(p);
    }
    return ds;
}

std::vector<std::vector<double>> cdf_series(const DistributionSeries& ds) {
    std::vector<std::vector<double>> out;
    out.reserve(ds.pdfs.size());
    for (const auto& pdf : ds.pdfs) {
        std::vector<double> cdf(pdf.size());
        std::partial_sum(pdf.begin(), pdf.end(), cdf.begin());
        out.push_back(std::move(cdf));
    }
    return out;
}

StationaryDistribution stationary_pdf(const GeneratorMatrix& g) {
    const auto classes = closed_classes(g);
    if (classes.empty()) throw NumericalError("rate matrix has no closed class");
    StationaryDistribution st;
    st.pdf.assign(g.size(), 0.0);
    st.closed_classes = classes.size();
    st.connected = classes.size() == 1;
    const double weight = 1.0 / static_cast<double>(classes.size());
    for (const auto& c : classes) {
        // Zero net flux across each edge: pi_{i+1} sub[i+1] = pi_i super[i].
        std::vector<double> logpi(c.hi - c.lo + 1, 0.0);
        for (std::size_t i = c.lo; i < c.hi; ++i) {
            logpi[i - c.lo + 1] = logpi[i - c.lo] + std::log(g.super[i]) - std::log(g.sub[i + 1]);
        }
        const double top = *std::max_element(logpi.begin(), logpi.end());
        double total = 0.0;
        for (auto& v : logpi) total += (v = std::exp(v - top));
        for (std::size_t i = c.lo; i <= c.hi; ++i) st.pdf[i] = weight * logpi[i - c.lo] / total;
    }
    return st;
}

Moments moments(const StateGrid& grid, std::span<const double> pdf) {
    Moments m;
    for (std::size_t i = 0; i < pdf.size(); ++i) m.mean += pdf[i] * grid.center(i);
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        const double d = grid.center(i) - m.mean;
        m.variance += pdf[i] * d * d;
    }
    return m;
}

Moments stationary_moments(const GeneratorMatrix& g) { return moments(g.grid, stationary_pdf(g).pdf); }

std::vector<double> coarsen_pdf(std::span<const double> pdf, std::size_t bins) {
    if (bins == 0 || pdf.size() % bins != 0) throw ConfigError("bin count must divide the number of cells");
    const std::size_t group = pdf.size() / bins;
    std::vector<double> out(bins, 0.0);
    for (std::size_t i = 0; i < pdf.size(); ++i) out[i / group] += pdf[i];
    return out;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("total variation needs vectors of equal length");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

double spectral_gap(const GeneratorMatrix& g, EigenMode mode) {
    const std::size_t n = g.size();
    const auto st = stationary_pdf(g);
    if (!st.connected) throw NumericalError("spectral gap needs a single closed class");

    // Symmetrised chain: same spectrum, off-diagonal sqrt(up_i * down_{i+1}).
    std::vector<double> off_sq(n - 1), off(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        off_sq[i] = g.super[i] * g.sub[i + 1];
        off[i] = std::sqrt(off_sq[i]);
    }
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = (i > 0 ? off[i - 1] : 0.0) + (i + 1 < n ? off[i] : 0.0);
        lo = std::min(lo, g.diag[i] - radius);
        hi = std::max(hi, g.diag[i] + radius);
    }
    const double scale = std::max(-lo, std::numeric_limits<double>::min());

    // Localise the target eigenvalue (k-th smallest) by Sturm bisection.
    const std::size_t k = mode == EigenMode::Slowest ? n - 2 : 0;
    // Sturm counts are backward stable, so bisect down to a few ulps of the matrix scale
    // or to relative precision, whichever is coarser.
    const double floor_abs = 64 * std::numeric_limits<double>::epsilon() * scale;
    double a = lo - 1e-12 * scale, b = hi + 1e-12 * scale;
    while (b - a > std::max(floor_abs, 1e-14 * std::min(std::abs(a), std::abs(b)))) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        (sturm_count_below(g.diag, off_sq, mid) > k ? b : a) = mid;
    }
    const double shift = 0.5 * (a + b);
    if (mode == EigenMode::Slowest && !(shift < 0.0)) {
        throw NumericalError("spectral gap is not separated from the zero eigenvalue");
    }

    // Shifted inverse iteration, with the known null vector sqrt(pi) projected out.
    std::vector<double> null_vec(n);
    double nn = 0.0;
    for (std::size_t i = 0; i < n; ++i) nn += (null_vec[i] = std::sqrt(st.pdf[i])) * null_vec[i];
    for (auto& v : null_vec) v /= std::sqrt(nn);

    auto apply = [&](const std::vector<double>& v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = g.diag[i] * v[i];
            if (i > 0) r[i] += off[i - 1] * v[i - 1];
            if (i + 1 < n) r[i] += off[i] * v[i + 1];
        }
        return r;
    };
    auto deflate_normalise = [&](std::vector<double>& v) {
        if (mode == EigenMode::Slowest) {
            const double c = std::inner_product(v.begin(), v.end(), null_vec.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * null_vec[i];
        }
        const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("inverse iteration broke down");
        for (auto& x : v) x /= norm;
    };

    std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = g.diag[i] - shift;
        if (i > 0) lower[i] = off[i - 1];
        if (i + 1 < n) upper[i] = off[i];
    }
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    deflate_normalise(v);

    double lambda = shift;
    for (int iter = 0; iter < 200; ++iter) {
        v = solve_tridiagonal_pivoted(lower, diag, upper, v);
        deflate_normalise(v);
        const auto tv = apply(v);
        lambda = std::inner_product(v.begin(), v.end(), tv.begin(), 0.0);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += (tv[i] - lambda * v[i]) * (tv[i] - lambda * v[i]);
        if (std::sqrt(res) <= 1e-8 * std::abs(lambda) + floor_abs) {
            if (std::abs(lambda - shift) > 1e-6 * std::abs(shift) + 1e3 * floor_abs) {
                throw NumericalError("inverse iteration converged to an unexpected eigenvalue");
            }
            return lambda;
        }
    }
    throw NumericalError("inverse iteration did not converge");
}

}  // namespace flexfn
