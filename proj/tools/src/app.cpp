#include "flexfn_cli/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "flexfn/bilinear.hpp"
#include "flexfn/equilibria.hpp"
#include "flexfn/error.hpp"
#include "flexfn/params_json.hpp"
#include "flexfn/stability.hpp"
#include "flexfn/util.hpp"
#include "flexfn_cli/config.hpp"

namespace flexfn::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> mode;
    std::optional<std::string> eigen_mode;
};

struct Context {
    RunConfig cfg;
    fs::path out;
    std::ostream& os;
    std::ostream& err;
};

std::ofstream open_output(const Context& ctx, const std::string& name) {
    std::ofstream f(ctx.out / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (ctx.out / name).string());
    return f;
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
    auto f = open_output(ctx, name);
    f << j.dump(2) << '\n';
}

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
    return stem + "_" + std::to_string(i) + ext;
}

// Parameter check shared by every command; prints each problem on its own line.
bool report_validation(const Context& ctx) {
    const auto rep = validate(ctx.cfg.params);
    for (const auto& w : rep.warnings) ctx.err << "warning: " << w << '\n';
    for (const auto& e : rep.errors) ctx.os << "invalid: " << e << '\n';
    return rep.ok();
}

int cmd_validate(Context& ctx) {
    const bool ok = report_validation(ctx);
    if (ok) ctx.os << "ok " << params_hash(ctx.cfg.params) << '\n';
    return ok ? kOk : kCheckFailed;
}

int cmd_simulate(Context& ctx) {
    if (!report_validation(ctx)) return kCheckFailed;
    const auto& p = ctx.cfg.params;
    auto sc = ctx.cfg.simulate;
    if (sc.runs.empty()) {
        for (int i = 1; i <= 9; ++i) sc.runs.push_back({i / 10.0, Schedule::constant(0.5, 0.4)});
    }
    const double dt = sc.dt.value_or(0.01 * p.capacity);
    const double t_end = sc.t_end.value_or(20.0 * p.capacity);

    for (std::size_t r = 0; r < sc.runs.size(); ++r) {
        const auto& run = sc.runs[r];
        if (sc.mode == SimMode::Ode) {
            const auto tr = integrate_ode(p, run.x0, run.schedule, dt, t_end);
            auto f = open_output(ctx, indexed("ode", r, ".csv"));
            write_trajectory_csv(f, tr);
            ctx.os << "ode run " << r << ": x0=" << format_double(run.x0)
                   << " x(T)=" << format_double(tr.states.back()) << '\n';
            continue;
        }
        if (sc.n_paths < 1) throw ConfigError("simulate.n_paths must be >= 1 in sde mode");
        const auto e = simulate_sde(p, run.x0, run.schedule,
                                    {dt, t_end, sc.n_paths, ctx.cfg.seed, ctx.cfg.threads, sc.record_stride});
        {
            auto f = open_output(ctx, indexed("sde", r, "_summary.csv"));
            write_ensemble_csv(f, e);
        }
        const std::size_t shown = std::min(sc.sample_paths, e.paths.size());
        if (shown > 0) {
            auto f = open_output(ctx, indexed("sde", r, "_paths.csv"));
            f << 't';
            for (std::size_t i = 0; i < shown; ++i) f << ",x" << i;
            f << '\n';
            for (std::size_t k = 0; k < e.times.size(); ++k) {
                f << format_double(e.times[k]);
                for (std::size_t i = 0; i < shown; ++i) f << ',' << format_double(e.paths[i].states[k]);
                f << '\n';
            }
        }
        const auto last = ensemble_stats(e, e.times.size() - 1);
        ctx.os << "sde run " << r << ": x0=" << format_double(run.x0) << " mean(T)=" << format_double(last.mean)
               << " var(T)=" << format_double(last.variance) << '\n';
    }
    return kOk;
}

int cmd_density(Context& ctx) {
    if (!report_validation(ctx)) return kCheckFailed;
    const auto& p = ctx.cfg.params;
    const auto& dc = ctx.cfg.density;
    const StateGrid grid(dc.n_cells);
    std::vector<double> times = dc.times;
    if (times.empty()) {
        for (int i = 0; i <= 40; ++i) times.push_back(20.0 * p.capacity * i / 40.0);
    }
    const std::size_t cases = std::max(dc.u.size(), dc.baseline.size());
    json summary = json::array();
    for (std::size_t c = 0; c < cases; ++c) {
        const double u = dc.u.size() == 1 ? dc.u[0] : dc.u[c];
        const double b = dc.baseline.size() == 1 ? dc.baseline[0] : dc.baseline[c];
        const auto g = build_generator(p, u, b, grid);
        const auto st = stationary_pdf(g);
        const auto m = moments(grid, st.pdf);
        const double h = grid.width();

        {
            auto f = open_output(ctx, indexed("stationary", c, ".csv"));
            f << "x,pdf\n";
            for (std::size_t i = 0; i < grid.size(); ++i)
                f << format_double(grid.center(i)) << ',' << format_double(st.pdf[i] / h) << '\n';
        }
        const auto ds = evolve_pdf(g, point_mass(grid, dc.x0), times, dc.max_dt);
        const auto cdf = cdf_series(ds);
        {
            auto f = open_output(ctx, indexed("transient", c, ".csv"));
            f << "t,x,pdf\n";
            for (std::size_t k = 0; k < ds.times.size(); ++k)
                for (std::size_t i = 0; i < grid.size(); ++i)
                    f << format_double(ds.times[k]) << ',' << format_double(grid.center(i)) << ','
                      << format_double(ds.pdfs[k][i] / h) << '\n';
        }
        {
            auto f = open_output(ctx, indexed("cdf", c, ".csv"));
            f << "t,x,cdf\n";
            for (std::size_t k = 0; k < ds.times.size(); ++k)
                for (std::size_t i = 0; i < grid.size(); ++i)
                    f << format_double(ds.times[k]) << ',' << format_double(grid.edge(i + 1)) << ','
                      << format_double(cdf[k][i]) << '\n';
        }

        const auto& last = ds.pdfs.back();
        const auto mode_cell = static_cast<std::size_t>(std::max_element(last.begin(), last.end()) - last.begin());
        json entry{{"u", u},
                   {"B", b},
                   {"n_cells", dc.n_cells},
                   {"stationary_mean", m.mean},
                   {"stationary_var", m.variance},
                   {"connected", st.connected},
                   {"final_time", ds.times.back()},
                   {"final_mean", moments(grid, last).mean},
                   {"final_mode", grid.center(mode_cell)}};
        entry["gap"] = st.connected ? json(spectral_gap(g, dc.eigen_mode)) : json(nullptr);
        entry["eigen_mode"] = dc.eigen_mode == EigenMode::Slowest ? "slowest" : "fastest";

        if (dc.mc_paths > 0) {
            const double t_mc = dc.mc_t_end.value_or(20.0 * p.capacity);
            const auto e = simulate_sde(p, dc.x0, Schedule::constant(u, b),
                                        {0.01 * p.capacity, t_mc, dc.mc_paths, ctx.cfg.seed, ctx.cfg.threads,
                                         step_count(0.01 * p.capacity, t_mc)});
            const auto hist = ensemble_stats(e, e.times.size() - 1, dc.mc_bins).histogram;
            const double tv = total_variation(coarsen_pdf(st.pdf, dc.mc_bins), hist);
            entry["mc_paths"] = dc.mc_paths;
            entry["mc_mean"] = ensemble_stats(e, e.times.size() - 1).mean;
            entry["mc_total_variation"] = tv;
        }
        ctx.os << "density case " << c << ": u=" << format_double(u) << " B=" << format_double(b)
               << " stationary mean=" << format_double(m.mean) << " var=" << format_double(m.variance) << '\n';
        summary.push_back(entry);
    }
    write_json(ctx, "density_summary.json", summary);
    return kOk;
}

int cmd_sweep(Context& ctx) {
    if (!report_validation(ctx)) return kCheckFailed;
    const auto& p = ctx.cfg.params;
    const auto& sc = ctx.cfg.sweep;
    const StateGrid grid(sc.n_cells);
    const std::size_t nb = sc.baseline.size(), n = sc.u.size() * nb;
    struct Row {
        double mean, var, gap;
    };
    std::vector<Row> rows(n);
    parallel_for(n, ctx.cfg.threads, [&](std::size_t k) {
        const auto g = build_generator(p, sc.u[k / nb], sc.baseline[k % nb], grid);
        const auto m = stationary_moments(g);
        rows[k] = {m.mean, m.variance, spectral_gap(g, sc.eigen_mode)};
    });

    auto f = open_output(ctx, "sweep.csv");
    f << "u,B,mean,var,gap\n";
    for (std::size_t k = 0; k < n; ++k) {
        f << format_double(sc.u[k / nb]) << ',' << format_double(sc.baseline[k % nb]) << ','
          << format_double(rows[k].mean) << ',' << format_double(rows[k].var) << ',' << format_double(rows[k].gap)
          << '\n';
    }
    std::size_t violations = 0;
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t i = 1; i < sc.u.size(); ++i) {
            const double prev = rows[(i - 1) * nb + j].mean, cur = rows[i * nb + j].mean;
            if (cur > prev + 1e-12) {
                ++violations;
                ctx.err << "mean increases in u at B=" << format_double(sc.baseline[j]) << ": u="
                        << format_double(sc.u[i - 1]) << " -> " << format_double(sc.u[i]) << '\n';
            }
        }
    }
    ctx.os << "sweep: " << n << " points, " << violations << " monotonicity violations\n";
    return kOk;
}

json degenerate_record(Claim claim, const FlexParams& p, const std::string& reason) {
    return {{"claim", to_string(claim)}, {"params_hash", params_hash(p)}, {"pass", false},
            {"degenerate", true}, {"reason", reason}};
}

int cmd_certify(Context& ctx) {
    if (!report_validation(ctx)) return kCheckFailed;
    const auto& p = ctx.cfg.params;
    const auto& cc = ctx.cfg.certify;
    if (cc.u_star != 0.0 && cc.u_star != 1.0) throw ConfigError("certify.u_star must be 0 or 1");

    json certs = json::array();
    bool all_pass = true;
    const auto det = certify_deterministic(p, cc.u_star, cc.b_star, cc.grid_n);
    certs.push_back(to_json(det));
    all_pass = all_pass && det.pass;

    json sigma = nullptr;
    if (eta1(p, cc.b_star) == 0.0) {
        const std::string why = "eta1 = 0 at B* = " + format_double(cc.b_star);
        certs.push_back(degenerate_record(Claim::StochasticBounded, p, why));
        certs.push_back(degenerate_record(Claim::StochasticStable, p, why));
        all_pass = false;
    } else {
        const auto bounded = boundedness_region(p, cc.u_star, cc.b_star, cc.grid_n);
        const auto stable = stability_radius(p, cc.u_star, cc.b_star, cc.theta, cc.grid_n);
        certs.push_back(to_json(bounded));
        certs.push_back(to_json(stable));
        all_pass = all_pass && bounded.pass && stable.pass;
        const auto sm = sigma_max(p, cc.u_star, cc.b_star, cc.target_radius, cc.theta);
        sigma = {{"target_radius", cc.target_radius}, {"theta", cc.theta}, {"sigma", sm.sigma}, {"capped", sm.capped}};
    }
    json doc{{"u_star", cc.u_star}, {"B_star", cc.b_star}, {"theta", cc.theta}, {"sigma_x", p.sigma_x},
             {"eta1", eta1(p, cc.b_star)}, {"certificates", certs}, {"sigma_max", sigma}};
    write_json(ctx, "certificates.json", doc);
    for (const auto& c : certs) {
        ctx.os << c["claim"].get<std::string>() << ": " << (c["pass"].get<bool>() ? "PASS" : "FAIL");
        if (c.value("degenerate", false)) ctx.os << " (degenerate)";
        ctx.os << '\n';
    }
    return all_pass ? kOk : kCheckFailed;
}

int cmd_examples(Context& ctx) {
    const auto& ec = ctx.cfg.examples;
    std::vector<double> dts = ec.dts;
    if (dts.empty()) {
        for (int e = 6; e <= 12; ++e) dts.push_back(std::ldexp(1.0, -e));
    }
    json summary = json::array();
    for (std::size_t c = 0; c < ec.cases.size(); ++c) {
        const auto& bp = ec.cases[c];
        const double omega = ec.omega;
        const auto ode = bilinear_ode(bp, [omega](double) { return omega; }, ec.dt, ec.t_end);
        const auto mean = bilinear_mean(bp, omega, ec.dt, ec.t_end);
        {
            auto f = open_output(ctx, indexed("example", c, "_deterministic.csv"));
            f << "t,x_ode,x_mean\n";
            for (std::size_t k = 0; k < ode.times.size(); ++k)
                f << format_double(ode.times[k]) << ',' << format_double(ode.values[k]) << ','
                  << format_double(mean.values[k]) << '\n';
        }
        const auto steps = static_cast<std::size_t>(std::llround(ec.t_end / ec.dt));
        const auto path = brownian_path(ctx.cfg.seed, c, ec.dt, steps);
        const auto em = gbm_euler_maruyama(bp, path);
        const auto exact = gbm_exact(bp, path);
        {
            auto f = open_output(ctx, indexed("example", c, "_paths.csv"));
            f << "t,x_em,x_exact\n";
            for (std::size_t k = 0; k < em.times.size(); ++k)
                f << format_double(em.times[k]) << ',' << format_double(em.values[k]) << ','
                  << format_double(exact.values[k]) << '\n';
        }
        const auto study = em_convergence_study(bp, dts, ec.n_paths, ctx.cfg.seed, 1.0, ctx.cfg.threads);
        {
            auto f = open_output(ctx, indexed("convergence", c, ".csv"));
            f << "dt,strong_error\n";
            for (const auto& row : study.rows) f << format_double(row.dt) << ',' << format_double(row.strong_error) << '\n';
        }
        const double lyap = lyapunov_estimate(bp, ec.lyapunov_t, ec.lyapunov_paths, ctx.cfg.seed);
        summary.push_back({{"r1", bp.r1},
                           {"r2", bp.r2},
                           {"mean_rate", bp.r1 + bp.r2 * omega},
                           {"strong_order_slope", study.slope},
                           {"lyapunov_estimate", lyap},
                           {"lyapunov_theory", bp.r1 - 0.5 * bp.r2 * bp.r2}});
        ctx.os << "example case " << c << ": r1=" << format_double(bp.r1) << " r2=" << format_double(bp.r2)
               << " slope=" << format_double(study.slope) << " lyapunov=" << format_double(lyap) << '\n';
    }
    write_json(ctx, "examples_summary.json", summary);
    return kOk;
}

RunConfig resolve_config(const Flags& flags, std::ostream& err) {
    RunConfig cfg = flags.config.empty() ? RunConfig{} : load_config(flags.config);
    if (flags.seed) {
        err << "override: seed = " << *flags.seed << " (--seed; config had " << cfg.seed << ")\n";
        cfg.seed = *flags.seed;
    }
    if (flags.threads) {
        if (*flags.threads < 1) throw ConfigError("--threads must be >= 1");
        err << "override: threads = " << *flags.threads << " (--threads; config had " << cfg.threads << ")\n";
        cfg.threads = *flags.threads;
    }
    if (flags.mode) {
        err << "override: simulate.mode = " << *flags.mode << " (--mode)\n";
        cfg.simulate.mode = *flags.mode == "sde" ? SimMode::Sde : SimMode::Ode;
    }
    if (flags.eigen_mode) {
        const auto m = *flags.eigen_mode == "fastest" ? EigenMode::Fastest : EigenMode::Slowest;
        err << "override: eigen_mode = " << *flags.eigen_mode << " (--eigen-mode)\n";
        cfg.density.eigen_mode = m;
        cfg.sweep.eigen_mode = m;
    }
    return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flexibility-function simulation and stability toolkit", "flexfn"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--threads", flags.threads, "worker threads");
    };
    auto* validate_cmd = app.add_subcommand("validate", "check the parameter set");
    auto* simulate_cmd = app.add_subcommand("simulate", "ODE trajectories or Euler-Maruyama ensembles");
    auto* density_cmd = app.add_subcommand("density", "transient and stationary distributions");
    auto* sweep_cmd = app.add_subcommand("sweep", "stationary moments and spectral gap over a (u, B) grid");
    auto* certify_cmd = app.add_subcommand("certify", "Lyapunov certificates");
    auto* examples_cmd = app.add_subcommand("examples", "bilinear examples and Euler-Maruyama convergence");
    for (auto* sub : {validate_cmd, simulate_cmd, density_cmd, sweep_cmd, certify_cmd, examples_cmd}) add_common(sub);
    simulate_cmd->add_option("--mode", flags.mode, "ode or sde")->check(CLI::IsMember({"ode", "sde"}));
    for (auto* sub : {density_cmd, sweep_cmd}) {
        sub->add_option("--eigen-mode", flags.eigen_mode, "slowest or fastest nonzero mode")
            ->check(CLI::IsMember({"slowest", "fastest"}));
    }

    std::vector<const char*> argv{"flexfn"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        Context ctx{resolve_config(flags, err), flags.out, out, err};
        fs::create_directories(ctx.out);
        if (*validate_cmd) return cmd_validate(ctx);
        if (*simulate_cmd) return cmd_simulate(ctx);
        if (*density_cmd) return cmd_density(ctx);
        if (*sweep_cmd) return cmd_sweep(ctx);
        if (*certify_cmd) return cmd_certify(ctx);
        return cmd_examples(ctx);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace flexfn::cli
