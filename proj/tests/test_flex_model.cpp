#include <cmath>
#include <random>

#include "doctest.h"
#include "flexfn/error.hpp"
#include "flexfn/flex_model.hpp"
#include "flexfn/params_json.hpp"

using namespace flexfn;

namespace {
bool has_message(const ValidationReport& r, const std::string& needle) {
    for (const auto& e : r.errors) {
        if (e.find(needle) != std::string::npos) return true;
    }
    return false;
}
}  // namespace

TEST_CASE("charge response") {
    const auto p = FlexParams::reference();
    CHECK(charge_response(p, 0.0) == doctest::Approx(1.0));
    CHECK(charge_response(p, 1.0) == doctest::Approx(-1.0));
    auto lin = FlexParams::linear_reference();
    CHECK(charge_response(lin, 0.25) == doctest::Approx(0.5));
    // reference shape reduces to 1 - 2x^2
    CHECK(charge_response(p, 0.3) == doctest::Approx(1.0 - 2 * 0.09).epsilon(1e-14));
    CHECK_THROWS_AS(charge_response(p, 1.5), std::domain_error);
}

TEST_CASE("price response") {
    const auto p = FlexParams::reference();
    CHECK(price_response(p, 0.0) == doctest::Approx(1.0));
    CHECK(price_response(p, 1.0) == doctest::Approx(-1.0));
    const auto row = p.basis.row(0.5);
    double sum = 0.0;
    for (double v : row) sum += v;
    CHECK(price_response(p, 0.5) == doctest::Approx(1.0 - 2.0 / 7.0 * sum));
    // symmetric basis with uniform weights: g(0.5) = 0
    CHECK(std::abs(price_response(p, 0.5)) < 1e-14);
    CHECK_THROWS_AS(price_response(p, -0.1), std::domain_error);
}

TEST_CASE("logistic response") {
    auto p = FlexParams::reference();
    CHECK(logistic_response(p, 0.0) == 0.0);
    CHECK(std::abs(logistic_response(p, 7.01) - 1.0) < 1e-9);  // k z > 42
    p.steepness = 6.0;
    const double expected = -1.0 + 2.0 / (1.0 + std::exp(-6.0 * 0.5));
    CHECK(logistic_response(p, 0.5) == doctest::Approx((1 - std::exp(-3.0)) / (1 + std::exp(-3.0))));
    CHECK(logistic_response(p, 0.5) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("demand change") {
    const auto p = FlexParams::reference();
    CHECK(demand_change(p, 1.0, 0.0) == doctest::Approx(0.0));
    CHECK(demand_change(p, 0.0, 1.0) == doctest::Approx(0.0));
    CHECK(demand_change(p, 0.0, 0.0) == doctest::Approx(std::tanh(6.0)));  // l(2)
    CHECK(demand_change(p, 0.0, 0.0) > 0.0);
    // f(x) = -g(u) at x = 1/sqrt(2), u = 0.5
    CHECK(std::abs(demand_change(p, std::sqrt(0.5), 0.5)) < 1e-14);
}

TEST_CASE("demand deviation and demand") {
    auto p = FlexParams::reference();
    p.lambda = 0.5;
    CHECK(demand_deviation(p, 0.0, 0.7) == 0.0);
    CHECK(demand_deviation(p, std::nextafter(1.0, 0.0), 0.4) == doctest::Approx(0.3));
    CHECK(demand_deviation(p, -0.5, 0.4) == doctest::Approx(-0.1));
    CHECK(demand(p, 0.0, 0.0, 0.4) == doctest::Approx(0.4 + std::tanh(6.0) * 0.5 * 0.6));
    CHECK(demand(p, std::sqrt(0.5), 0.5, 0.4) == doctest::Approx(0.4));
    CHECK(demand(p, 0.9, 0.5, 0.0) == 0.0);  // B = 0 with delta < 0
}

TEST_CASE("drift") {
    const auto lin = FlexParams::linear_reference();
    CHECK(std::abs(drift(lin, 0.5, 0.5, 0.4)) < 1e-14);
    for (double u : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(drift(lin, 1.0, u, 0.4) <= 0.0);
        CHECK(drift(lin, 0.0, u, 0.4) >= 0.0);
    }
    const double delta = std::tanh(3.0 * ((1 - 2 * 0.2) + price_response(lin, 0.5)));
    CHECK(drift(lin, 0.2, 0.5, 0.4) == doctest::Approx(demand_deviation(lin, delta, 0.4) / 2.97));
}

TEST_CASE("diffusion") {
    auto p = FlexParams::reference();
    CHECK(diffusion(p, 0.0) == 0.0);
    CHECK(diffusion(p, 1.0) == 0.0);
    CHECK(diffusion(p, 0.5) == doctest::Approx(0.025));
    p.sigma_x = 0.0;
    CHECK(diffusion(p, 0.3) == 0.0);
}

TEST_CASE("validate") {
    const auto ref = validate(FlexParams::reference());
    CHECK(ref.ok());
    CHECK(ref.warnings.size() == 1);  // lambda = 1
    CHECK(validate(FlexParams::linear_reference()).ok());

    auto bad_alpha = FlexParams::reference();
    bad_alpha.alpha = {0, 2, 0, 0};
    CHECK(has_message(validate(bad_alpha), "alpha2+alpha3+alpha4 != 1"));

    auto bad_beta = FlexParams::reference();
    bad_beta.beta[2] = 0.1;
    bad_beta.beta[3] -= 0.1;
    CHECK(has_message(validate(bad_beta), "g not monotone decreasing"));

    auto many = FlexParams::reference();
    many.capacity = -1;
    many.steepness = 0;
    many.sigma_x = -0.1;
    many.alpha = {0, 2, 0, 0};
    const auto r = validate(many);
    CHECK(r.errors.size() >= 4);

    auto flat = FlexParams::reference();
    flat.beta = {-1, -1, 0, 0, 0, 0, 0};  // g constant on [0.4, 1]
    const auto fr = validate(flat);
    CHECK(fr.ok());
    CHECK(fr.warnings.size() == 2);

    auto nonmono = FlexParams::reference();
    nonmono.alpha = {0.9, 1, 0, 0};
    CHECK(has_message(validate(nonmono), "f not monotone decreasing"));
    CHECK_THROWS_AS(require_valid(nonmono), ConfigError);
}

TEST_CASE("property: logistic is odd") {
    const auto p = FlexParams::reference();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> dist(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = dist(gen);
        REQUIRE(std::abs(logistic_response(p, z) + logistic_response(p, -z)) < 1e-12);
    }
}

TEST_CASE("property: monotone responses on a 200-point grid") {
    const auto p = FlexParams::reference();
    for (int j = 1; j < 200; ++j) {
        const double a = (j - 1) / 199.0, b = j / 199.0;
        REQUIRE(charge_response(p, b) <= charge_response(p, a));
        REQUIRE(price_response(p, b) <= price_response(p, a));
        REQUIRE(logistic_response(p, 4 * b - 2) > logistic_response(p, 4 * a - 2));
    }
}

TEST_CASE("property: demand stays in [0,1]") {
    for (const auto& p : {FlexParams::reference(), FlexParams::linear_reference()}) {
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                for (int k = 0; k <= 10; ++k) {
                    const double d = demand(p, i / 20.0, j / 20.0, k / 10.0);
                    REQUIRE(d >= 0.0);
                    REQUIRE(d <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("property: drift points toward the equilibrium") {
    const auto p = FlexParams::reference();
    // f(x) = 1 - 2x^2 so x* = sqrt((1 + g(u)) / 2)
    for (double u : {0.1, 0.35, 0.5, 0.8}) {
        const double xs = std::sqrt((1.0 + price_response(p, u)) / 2.0);
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            if (std::abs(x - xs) < 1e-9) continue;
            REQUIRE((x - xs) * drift(p, x, u, 0.4) < 0.0);
        }
    }
}

TEST_CASE("params JSON") {
    const auto p = FlexParams::reference();
    const auto j = to_json(p);
    CHECK(j.at("C") == 2.97);
    CHECK(j.at("basis").at("order") == 3);
    CHECK(params_from_json(j) == p);
    CHECK(params_hash(p) == params_hash(params_from_json(j)));

    auto q = p;
    q.sigma_x = 0.2;
    CHECK(params_hash(q) != params_hash(p));

    const auto partial = params_from_json(nlohmann::json{{"sigma_x", 0.3}, {"basis", {{"count", 7}}}});
    CHECK(partial.sigma_x == 0.3);
    CHECK(partial.capacity == 2.97);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"sigma", 0.3}}), ConfigError);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"C", "big"}}), ConfigError);
}
