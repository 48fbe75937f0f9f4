#include "flexfn/ispline.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "flexfn/error.hpp"

namespace flexfn {
namespace {

// Index s with knots[s] <= u < knots[s+1], restricted to the valid spans for `degree`.
std::size_t find_span(std::span<const double> knots, int degree, double u) {
    const std::size_t n = knots.size() - static_cast<std::size_t>(degree) - 1;  // basis count
    if (u >= knots[n]) return n - 1;
    auto it = std::upper_bound(knots.begin() + degree, knots.begin() + static_cast<std::ptrdiff_t>(n), u);
    return static_cast<std::size_t>(it - knots.begin()) - 1;
}

// Nonzero degree-p B-splines N_{span-p..span}(u) (Cox-de Boor, triangular form).
std::vector<double> basis_funs(std::span<const double> knots, int degree, std::size_t span, double u) {
    const auto p = static_cast<std::size_t>(degree);
    std::vector<double> n(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
    n[0] = 1.0;
    for (std::size_t j = 1; j <= p; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
            const double temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    return n;
}

void check_unit(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::domain_error("spline argument outside [0,1]: " + std::to_string(u));
    }
}

}  // namespace

ISplineBasis::ISplineBasis(int order, std::vector<double> knots) : order_(order), knots_(std::move(knots)) {
    if (order_ < 1) throw ConfigError("spline order must be >= 1");
    const auto k = static_cast<std::size_t>(order_);
    if (knots_.size() < 2 * k) throw ConfigError("knot vector too short for spline order");
    if (!std::is_sorted(knots_.begin(), knots_.end())) throw ConfigError("knots must be nondecreasing");
    for (std::size_t j = 0; j < k; ++j) {
        if (knots_[j] != 0.0 || knots_[knots_.size() - 1 - j] != 1.0) {
            throw ConfigError("knot vector must be clamped: 0 and 1 repeated `order` times");
        }
    }
    for (std::size_t j = k; j + k < knots_.size(); ++j) {
        if (!(knots_[j] > 0.0 && knots_[j] < 1.0)) throw ConfigError("interior knots must lie strictly inside (0,1)");
    }
    for (std::size_t j = k; j + k < knots_.size();) {
        std::size_t run = 1;
        while (j + run + k < knots_.size() && knots_[j + run] == knots_[j]) ++run;
        if (run > k) throw ConfigError("interior knot multiplicity cannot exceed the spline order");
        j += run;
    }
    extended_.reserve(knots_.size() + 2);
    extended_.push_back(0.0);
    extended_.insert(extended_.end(), knots_.begin(), knots_.end());
    extended_.push_back(1.0);
}

ISplineBasis ISplineBasis::uniform(int order, std::size_t basis_count) {
    if (order < 1) throw ConfigError("spline order must be >= 1");
    const auto k = static_cast<std::size_t>(order);
    if (basis_count < k) throw ConfigError("basis_count must be at least the spline order");
    const std::size_t intervals = basis_count - k + 1;
    std::vector<double> knots(k, 0.0);
    for (std::size_t j = 1; j < intervals; ++j) knots.push_back(static_cast<double>(j) / static_cast<double>(intervals));
    knots.insert(knots.end(), k, 1.0);
    return ISplineBasis(order, std::move(knots));
}

void ISplineBasis::check_index(std::size_t i) const {
    if (i >= basis_count()) {
        throw std::out_of_range("basis index " + std::to_string(i) + " out of range (count " +
                                std::to_string(basis_count()) + ")");
    }
}

double ISplineBasis::mspline(std::size_t i, double u) const {
    check_index(i);
    check_unit(u);
    const int degree = order_ - 1;
    const std::size_t span = find_span(knots_, degree, u);
    const auto p = static_cast<std::size_t>(degree);
    if (i + p < span || i > span) return 0.0;
    const auto n = basis_funs(knots_, degree, span, u);
    const double width = knots_[i + static_cast<std::size_t>(order_)] - knots_[i];
    return static_cast<double>(order_) * n[i + p - span] / width;
}

double ISplineBasis::ispline(std::size_t i, double u) const {
    check_index(i);
    return row(u)[i];
}

std::vector<double> ISplineBasis::row(double u) const {
    check_unit(u);
    const int degree = order_;
    const std::size_t span = find_span(extended_, degree, u);
    const auto n = basis_funs(extended_, degree, span, u);
    const auto p = static_cast<std::size_t>(degree);

    // I_i(u) = sum of extended B-splines with index > i.
    const std::size_t count = basis_count();
    std::vector<double> out(count, 0.0);
    double tail = 0.0;
    for (std::size_t m = count; m >= 1; --m) {
        if (m <= span && m + p >= span) tail += n[m + p - span];
        out[m - 1] = tail;
    }
    for (auto& v : out) v = std::min(v, 1.0);
    return out;
}

}  // namespace flexfn
