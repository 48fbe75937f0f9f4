#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "flexfn/dynamics.hpp"
#include "flexfn/error.hpp"
#include "flexfn/stability.hpp"

using namespace flexfn;

namespace {

FlexParams with_sigma(double s, FlexParams p = FlexParams::reference()) {
    p.sigma_x = s;
    return p;
}

}  // namespace

TEST_CASE("LV at the boundary equilibria") {
    const auto p = FlexParams::reference();
    CHECK(lv_eval(p, 1.0, 0.0, 0.4, 1.0) == 0.0);
    CHECK(lv_eval(p, 0.0, 1.0, 0.4, 0.0) == 0.0);
    CHECK_THROWS_AS(lv_eval(p, 0.5, 0.5, 0.4, 0.5), std::domain_error);
    CHECK_THROWS_AS(lv_eval(p, 0.5, 1.0, 0.4, 1.0), std::domain_error);
}

TEST_CASE("LV is negative off the equilibrium without noise") {
    const auto p = with_sigma(0.0);
    for (int j = 0; j < 200; ++j) {
        const double x = j / 200.0;
        REQUIRE(lv_eval(p, x, 0.0, 0.4, 1.0) < 0.0);
        REQUIRE(lv_eval(p, 1.0 - x, 1.0, 0.4, 0.0) < 0.0);
    }
}

TEST_CASE("LV composition at x = 0.9") {
    const auto p = FlexParams::reference();
    const double first = (demand(p, 0.9, 0.0, 0.4) - 0.4) * (0.9 - 1.0) / p.capacity;
    CHECK(first < 0.0);
    const double second = 0.5 * (0.9 * 0.1) * (0.9 * 0.1) * 0.01;
    CHECK(lv_eval(p, 0.9, 0.0, 0.4, 1.0) == doctest::Approx(first + second).epsilon(1e-14));
}

TEST_CASE("property: LV equals drift term plus diffusion term") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 1000; ++n) {
        const auto p = with_sigma(2.0 * unit(gen));
        const double x = unit(gen), b = unit(gen);
        const bool top = n % 2 == 0;
        const double u = top ? 0.0 : 1.0, xs = top ? 1.0 : 0.0;
        const double expect = drift(p, x, u, b) * (x - xs) + 0.5 * diffusion(p, x) * diffusion(p, x);
        REQUIRE(std::abs(lv_eval(p, x, u, b, xs) - expect) < 1e-12);
    }
}

TEST_CASE("eta1") {
    auto p = FlexParams::reference();
    p.capacity = 2.0;
    CHECK(eta1(p, 0.5) == doctest::Approx(0.25));
    CHECK(eta1(FlexParams::reference(), 0.4) == doctest::Approx(0.134680).epsilon(1e-5));
    CHECK(eta1(FlexParams::reference(), 0.0) == 0.0);
    CHECK(eta1(FlexParams::reference(), 1.0) == 0.0);
}

TEST_CASE("boundedness certificate") {
    const auto c = boundedness_region(FlexParams::reference(), 0.0, 0.4);
    CHECK(c.claim == Claim::StochasticBounded);
    CHECK(c.threshold == doctest::Approx(0.01 / (32 * 0.4 / 2.97)));
    CHECK(c.threshold == doctest::Approx(2.321e-3).epsilon(1e-3));
    CHECK(c.pass);
    CHECK(c.margin <= 0.0);
    CHECK_FALSE(c.failed_region.has_value());

    const auto quiet = boundedness_region(with_sigma(0.0), 0.0, 0.4);
    CHECK(quiet.threshold == 0.0);
    CHECK(quiet.pass);
    CHECK(quiet.points_checked == kCertificateGrid - 1);  // only x* itself is excluded

    // The bound is sufficient, so the certificate holds even at sigma_x = 2; the
    // certified set just shrinks to the points where the logistic term dominates.
    const auto loud = boundedness_region(with_sigma(2.0), 0.0, 0.4);
    CHECK(loud.threshold == doctest::Approx(4.0 / (32 * 0.4 / 2.97)));
    CHECK(loud.pass);
    CHECK(loud.points_checked < quiet.points_checked / 10);

    CHECK_THROWS_AS(boundedness_region(FlexParams::reference(), 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(boundedness_region(FlexParams::reference(), 0.5, 0.4), std::domain_error);
}

TEST_CASE("stability radius certificate") {
    const auto c = stability_radius(FlexParams::reference(), 0.0, 0.4, 0.5);
    CHECK(c.claim == Claim::StochasticStable);
    CHECK(c.threshold == 1.0);
    CHECK(c.pass);
    CHECK(c.region.lo == 0.0);

    const auto tiny = stability_radius(FlexParams::reference(), 0.0, 0.4, 1e-9);
    CHECK(tiny.threshold < 1e-6);
    CHECK(tiny.pass);
    CHECK(tiny.degenerate);
    CHECK(tiny.points_checked == 0);

    // sigma chosen so that r = 2 eta1 theta / sigma^2 = 0.3
    const double e1 = eta1(FlexParams::reference(), 0.4);
    const double s = std::sqrt(2 * e1 * 0.5 / 0.3);
    const auto r03 = stability_radius(with_sigma(s), 0.0, 0.4, 0.5);
    CHECK(r03.threshold == doctest::Approx(0.3));
    CHECK(r03.pass);
    CHECK(r03.region.lo >= 0.7 - 1e-12);

    CHECK(stability_radius(with_sigma(0.0), 0.0, 0.4).threshold == 1.0);
    CHECK_THROWS_AS(stability_radius(FlexParams::reference(), 0.0, 0.4, 1.0), ConfigError);
    CHECK_THROWS_AS(stability_radius(FlexParams::reference(), 0.0, 0.4, 0.5, 50), ConfigError);
}

TEST_CASE("stability radius certificate reports failures") {
    // linear f: LV > 0 next to x* once sigma^2 / 2 beats the drift slope
    const auto lin = stability_radius(with_sigma(2.0, FlexParams::linear_reference()), 0.0, 0.4);
    CHECK_FALSE(lin.pass);
    CHECK(lin.margin > 0.0);
    REQUIRE(lin.failed_region.has_value());
    CHECK(lin.failed_region->hi < 1.0);
    CHECK(lin.failed_region->lo >= 1.0 - lin.threshold - 1e-12);

    // reference f is flat at 0, so x* = 0 cannot be certified with any noise
    const auto flat = stability_radius(FlexParams::reference(), 1.0, 0.4);
    CHECK_FALSE(flat.pass);
    REQUIRE(flat.failed_region.has_value());
    CHECK(flat.failed_region->lo < 0.01);

    const auto j = to_json(lin);
    CHECK(j["claim"] == "stoch-stable");
    CHECK(j["pass"] == false);
    CHECK(j["failed_region"].is_array());
}

TEST_CASE("sigma_max") {
    const auto p = FlexParams::reference();
    const double e1 = eta1(p, 0.4);
    const auto full = sigma_max(p, 0.0, 0.4, 1.0, 0.5);
    CHECK_FALSE(full.capped);
    CHECK(full.sigma == doctest::Approx(std::sqrt(2 * e1 * 0.5)).epsilon(1e-9));
    CHECK(full.sigma == doctest::Approx(0.367).epsilon(1e-3));
    CHECK(radius_certified(with_sigma(full.sigma * (1 - 1e-6)), 0.0, 0.4, 1.0, 0.5));
    CHECK_FALSE(radius_certified(with_sigma(full.sigma * (1 + 1e-6)), 0.0, 0.4, 1.0, 0.5));

    const auto zero_target = sigma_max(p, 0.0, 0.4, 0.0, 0.5);
    CHECK(zero_target.capped);
    CHECK(zero_target.sigma == 1e6);

    double prev = 1e300;
    for (double r : {0.05, 0.1, 0.3, 0.6, 1.0}) {
        const auto s = sigma_max(p, 0.0, 0.4, r, 0.5);
        CHECK(s.sigma <= prev);
        prev = s.sigma;
    }

    CHECK_THROWS_AS(sigma_max(p, 0.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(sigma_max(p, 0.0, 0.4, 1.5), ConfigError);
    // at x* = 0 only noise small enough to hide below the grid spacing is certified
    CHECK(sigma_max(p, 1.0, 0.4, 0.5).sigma < 0.1);
}

TEST_CASE("property: every sigma below sigma_max is certified") {
    const auto p = FlexParams::reference();
    for (double r : {0.1, 0.3, 0.6, 1.0}) {
        const double smax = sigma_max(p, 0.0, 0.4, r, 0.5).sigma;
        for (int i = 0; i <= 10; ++i) {
            const auto c = stability_radius(with_sigma(smax * i / 10.0), 0.0, 0.4, 0.5);
            REQUIRE(c.pass);
            REQUIRE(c.threshold >= r * (1 - 1e-9));
        }
    }
}

TEST_CASE("property: certified radius is respected by simulated paths") {
    const auto p = with_sigma(0.5);
    const auto cert = stability_radius(p, 0.0, 0.4);
    REQUIRE(cert.pass);
    const double r = cert.threshold;
    const auto e = simulate_sde(p, 1.0 - r / 2, Schedule::constant(0.0, 0.4), {0.0297, 59.4, 400, 2024, 4, 10});
    for (std::size_t k = 0; k < e.times.size(); ++k) {
        std::vector<double> dist;
        for (const auto& path : e.paths) dist.push_back(1.0 - path.states[k]);
        std::sort(dist.begin(), dist.end());
        REQUIRE(dist[dist.size() / 2] < r);
        REQUIRE(dist[static_cast<std::size_t>(0.95 * static_cast<double>(dist.size()))] < r);
    }
}
