#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "flexfn/dynamics.hpp"
#include "flexfn/equilibria.hpp"
#include "flexfn/error.hpp"

using namespace flexfn;

TEST_CASE("schedule lookup and validation") {
    Schedule s{{0.0, 10.0, 20.0}, {0.5, 0.2, 0.8}, {0.4, 0.4, 0.6}};
    CHECK_NOTHROW(s.check());
    CHECK(s.at(0.0).u == 0.5);
    CHECK(s.at(9.99).u == 0.5);
    CHECK(s.at(10.0).u == 0.2);
    CHECK(s.at(25.0).baseline == 0.6);
    CHECK_THROWS_AS((Schedule{{0.0, 0.0}, {0.1, 0.2}, {0.1, 0.2}}.check()), ConfigError);
    CHECK_THROWS_AS((Schedule{{0.0}, {1.2}, {0.1}}.check()), ConfigError);
    CHECK_THROWS_AS((Schedule{{0.0, 1.0}, {0.1}, {0.1, 0.2}}.check()), ConfigError);
}

TEST_CASE("ODE started at equilibrium stays there") {
    const auto p = FlexParams::reference();
    const double xs = solve_equilibrium(p, 0.3).x_star;
    const auto tr = integrate_ode(p, xs, Schedule::constant(0.3, 0.4), 0.0297, 30.0);
    for (double x : tr.states) REQUIRE(std::abs(x - xs) < 1e-10);
    for (double d : tr.demands) REQUIRE(std::abs(d - 0.4) < 1e-10);
}

TEST_CASE("ODE trajectories from different starts converge to the same state") {
    const auto p = FlexParams::reference();
    const double xs = solve_equilibrium(p, 0.5).x_star;
    for (int i = 1; i <= 9; ++i) {
        const auto tr = integrate_ode(p, i / 10.0, Schedule::constant(0.5, 0.4), 0.0297, 40 * 2.97);
        CHECK(std::abs(tr.states.back() - xs) < 1e-4);
        CHECK(tr.times.size() == tr.states.size());
    }
}

TEST_CASE("RK4 error drops by ~16 when dt halves") {
    const auto p = FlexParams::reference();
    const auto sched = Schedule::constant(0.5, 0.4);
    const double t_end = 1.6;
    auto terminal = [&](double dt) { return integrate_ode(p, 0.1, sched, dt, t_end).states.back(); };
    const double ref = terminal(0.02 / 10);
    const double e1 = std::abs(terminal(0.2) - ref);
    const double e2 = std::abs(terminal(0.1) - ref);
    const double e3 = std::abs(terminal(0.05) - ref);
    INFO("errors " << e1 << " " << e2 << " " << e3);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
    CHECK(e2 / e3 > 12.0);
    CHECK(e2 / e3 < 20.0);
}

TEST_CASE("noise-free Euler-Maruyama tracks the ODE to first order") {
    auto p = FlexParams::reference();
    p.sigma_x = 0.0;
    const auto sched = Schedule::constant(0.2, 0.4);
    const double ode = integrate_ode(p, 0.5, sched, 0.001, 3.0).states.back();
    auto em = [&](double dt) {
        return simulate_sde(p, 0.5, sched, {dt, 3.0, 1, 5, 1, 1}).paths[0].states.back();
    };
    const double e1 = std::abs(em(0.02) - ode), e2 = std::abs(em(0.01) - ode);
    CHECK(e1 < 0.02);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("ensemble is bit-identical across thread counts") {
    const auto p = FlexParams::reference();
    const auto sched = Schedule::constant(0.2, 0.4);
    const auto a = simulate_sde(p, 0.5, sched, {0.0297, 5.0, 64, 123, 1, 7});
    const auto b = simulate_sde(p, 0.5, sched, {0.0297, 5.0, 64, 123, 4, 7});
    const auto c = simulate_sde(p, 0.5, sched, {0.0297, 5.0, 64, 124, 4, 7});
    REQUIRE(a.paths.size() == 64);
    bool differs = false;
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        REQUIRE(a.paths[i].states == b.paths[i].states);
        differs = differs || a.paths[i].states != c.paths[i].states;
    }
    CHECK(differs);
    CHECK(a.times == b.times);
    CHECK(a.times.back() == doctest::Approx(169 * 0.0297));  // last step always kept
}

TEST_CASE("simulate_sde argument errors") {
    const auto p = FlexParams::reference();
    const auto s = Schedule::constant(0.2, 0.4);
    CHECK_THROWS_AS(simulate_sde(p, 0.5, s, {0.01, 1.0, 0, 1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(simulate_sde(p, 1.5, s, {0.01, 1.0, 1, 1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(integrate_ode(p, 0.5, s, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(integrate_ode(p, 0.5, s, 0.1, 0.05), ConfigError);
    auto bad = p;
    bad.alpha = {0, 2, 0, 0};
    CHECK_THROWS_AS(integrate_ode(bad, 0.5, s, 0.1, 1.0), ConfigError);
}

TEST_CASE("ensemble statistics") {
    const auto p = FlexParams::reference();
    const auto one = simulate_sde(p, 0.5, Schedule::constant(0.2, 0.4), {0.0297, 3.0, 1, 1, 1, 1});
    const auto s1 = ensemble_stats(one, one.times.size() - 1);
    CHECK(s1.variance == 0.0);
    CHECK(s1.q05 == s1.q95);

    auto quiet = p;
    quiet.sigma_x = 0.0;
    const auto e = simulate_sde(quiet, 0.5, Schedule::constant(0.2, 0.4), {0.0297, 3.0, 16, 1, 2, 10});
    for (std::size_t k = 0; k < e.times.size(); ++k) CHECK(ensemble_stats(e, k).variance == 0.0);

    const auto noisy = simulate_sde(p, 0.5, Schedule::constant(0.2, 0.4), {0.0297, 3.0, 200, 9, 2, 10});
    const auto cs = ensemble_stats_at(noisy, 3.0, 20);
    double mass = 0.0;
    for (double h : cs.histogram) mass += h;
    CHECK(mass == doctest::Approx(1.0));
    CHECK(cs.histogram.size() == 20);
    CHECK(cs.q05 <= cs.q50);
    CHECK(cs.q50 <= cs.q95);
    CHECK(cs.variance > 0.0);
}

TEST_CASE("quantile interpolates linearly") {
    CHECK(quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({5.0}, 0.95) == 5.0);
    CHECK(quantile({0.0, 10.0}, 0.05) == doctest::Approx(0.5));
}

TEST_CASE("property: states stay in [0,1] for random parameters and schedules") {
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int run = 0; run < 200; ++run) {
        auto p = FlexParams::reference();
        p.capacity = 0.5 + 5.0 * unit(gen);
        p.lambda = 0.05 + 0.95 * unit(gen);
        p.steepness = 0.5 + 20.0 * unit(gen);
        p.sigma_x = 2.0 * unit(gen);
        p.alpha = {0.5 * unit(gen), 1.0, 0.0, 0.0};
        Schedule s{{0.0, 2.0, 5.0}, {unit(gen), unit(gen), unit(gen)}, {unit(gen), unit(gen), unit(gen)}};
        const double dt = 1e-3 * p.capacity;
        const auto tr = integrate_ode(p, unit(gen), s, 10 * dt, 8.0);
        for (double x : tr.states) REQUIRE((x >= 0.0 && x <= 1.0));
        const auto e = simulate_sde(p, unit(gen), s, {dt, 8.0, 2, static_cast<std::uint64_t>(run), 1, 50});
        for (const auto& path : e.paths) {
            for (double x : path.states) REQUIRE((x >= 0.0 && x <= 1.0));
            REQUIRE(path.overshoot <= 10 * dt);
        }
    }
}

TEST_CASE("terminal ensemble mean is nonincreasing in price") {
    const auto p = FlexParams::reference();
    double prev = 2.0;
    for (double u : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto e = simulate_sde(p, 0.5, Schedule::constant(u, 0.4), {0.0297, 20 * 2.97, 200, 11, 4, 100});
        const double m = ensemble_stats(e, e.times.size() - 1).mean;
        CHECK(m <= prev);
        prev = m;
    }
}

TEST_CASE("CSV exports") {
    const auto p = FlexParams::reference();
    const auto tr = integrate_ode(p, 0.5, Schedule::constant(0.2, 0.4), 0.5, 1.0);
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    CHECK(os.str().rfind("t,x,d\n0,0.5,", 0) == 0);

    const auto e = simulate_sde(p, 0.5, Schedule::constant(0.2, 0.4), {0.5, 1.0, 3, 1, 1, 1});
    std::ostringstream es;
    write_ensemble_csv(es, e);
    CHECK(es.str().rfind("t,mean,var,q05,q50,q95\n0,0.5,0,0.5,0.5,0.5\n", 0) == 0);
}
