#include "atlas/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "atlas/acceptance.hpp"
#include "atlas/dynamics.hpp"
#include "atlas/estimators.hpp"
#include "atlas/io.hpp"
#include "atlas/kernels.hpp"
#include "atlas/limit_field.hpp"
#include "atlas/quadrature.hpp"
#include "atlas/stats.hpp"

namespace atlas::cli {

namespace kn = atlas::kernels;
using nlohmann::json;

json config_to_json(const RunConfig& c) {
    return json{{"a", c.a},
                {"gamma", c.gamma},
                {"n_particles", c.n_particles},
                {"dt", c.dt},
                {"horizon", c.horizon},
                {"profile", c.profile},
                {"eps", c.eps},
                {"t_grid", c.t_grid},
                {"x_grid", c.x_grid},
                {"record_times", c.record_times},
                {"replicas", c.replicas},
                {"master_seed", c.master_seed},
                {"out_dir", c.out_dir},
                {"suite", c.suite},
                {"workers", c.workers},
                {"x", c.x},
                {"field", c.field},
                {"burnin", c.burnin},
                {"batches", c.batches},
                {"thin", c.thin},
                {"theory", c.theory}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    j.at("a").get_to(c.a);
    j.at("gamma").get_to(c.gamma);
    j.at("n_particles").get_to(c.n_particles);
    j.at("dt").get_to(c.dt);
    j.at("horizon").get_to(c.horizon);
    j.at("profile").get_to(c.profile);
    j.at("eps").get_to(c.eps);
    j.at("t_grid").get_to(c.t_grid);
    j.at("x_grid").get_to(c.x_grid);
    j.at("record_times").get_to(c.record_times);
    j.at("replicas").get_to(c.replicas);
    j.at("master_seed").get_to(c.master_seed);
    j.at("out_dir").get_to(c.out_dir);
    j.at("suite").get_to(c.suite);
    j.at("workers").get_to(c.workers);
    j.at("x").get_to(c.x);
    j.at("field").get_to(c.field);
    j.at("burnin").get_to(c.burnin);
    j.at("batches").get_to(c.batches);
    j.at("thin").get_to(c.thin);
    j.at("theory").get_to(c.theory);
    return c;
}

namespace {

ProfileKind parse_profile(const std::string& name) {
    if (name == "nu") return ProfileKind::nu_a_gamma;
    if (name == "tilde_nu") return ProfileKind::tilde_nu_a_gamma;
    if (name == "homogeneous") return ProfileKind::homogeneous_mu0;
    if (name == "mu_a") return ProfileKind::raw_poisson_mu_a;
    throw CLI::ValidationError("profile", "unknown profile: " + name);
}

ModelParams model_params(const RunConfig& c) {
    ModelParams p;
    p.a = c.a;
    p.gamma = c.gamma;
    p.n_particles = c.n_particles;
    p.dt = c.dt;
    p.horizon = c.horizon;
    return p;
}

ProfileSpec profile_spec(const RunConfig& c) {
    ProfileSpec s;
    s.kind = parse_profile(c.profile);
    s.params = model_params(c);
    return s;
}

std::vector<double> effective_record_times(const RunConfig& c) {
    if (!c.record_times.empty()) return c.record_times;
    return c.t_grid;
}

std::string d2s(double v) { return io::format_double(v); }

// ---- subcommand bodies ----------------------------------------------------

int cmd_profile(const RunConfig& c) {
    const ParticleConfig config = sample_profile(profile_spec(c), c.n_particles,
                                                 RngSpec{c.master_seed});
    std::string csv = "rank,position\n";
    for (std::size_t i = 0; i < config.positions.size(); ++i)
        csv += io::csv_row({std::to_string(i), d2s(config.positions[i])});
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "profile.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_simulate(const RunConfig& c) {
    IntegratorReport report;
    const auto paths = simulate_paths(profile_spec(c), model_params(c),
                                      effective_record_times(c), c.replicas,
                                      RngSpec{c.master_seed}, &report, c.workers);
    io::ManifestWriter manifest(config_to_json(c));
    for (const auto& path : paths) {
        std::string csv = "time,rank,position\n";
        for (std::size_t k = 0; k < path.frames.size(); ++k)
            for (std::size_t i = 0; i < path.frames[k].positions.size(); ++i)
                csv += io::csv_row({d2s(path.times[k]), std::to_string(i),
                                    d2s(path.frames[k].positions[i])});
        manifest.add_artifact(c.out_dir, "sim_r" + std::to_string(path.replica_id) + ".csv",
                              csv);
    }
    std::string report_json = json{{"argmin_top_fraction", report.argmin_top_fraction},
                                   {"max_position_drift", report.max_position_drift},
                                   {"steps", report.steps},
                                   {"warning", report.warning}}
                                  .dump(2) +
                              "\n";
    manifest.add_artifact(c.out_dir, "report.json", report_json);
    manifest.write(c.out_dir);
    if (report.warning) std::cerr << "warning: truncation bound the minimum at least once\n";
    return 0;
}

int cmd_gaps(const RunConfig& c) {
    ModelParams params = model_params(c);
    std::vector<double> record_times;
    const double step = params.dt * static_cast<double>(c.thin);
    const auto n_records = static_cast<std::size_t>((params.horizon - c.burnin) / step + 1.5);
    for (std::size_t k = 0; k < n_records; ++k)
        record_times.push_back(c.burnin + static_cast<double>(k) * step);

    const std::size_t n_gaps = static_cast<std::size_t>(params.n_particles) - 1;
    auto reduce = [&](const SimPath& path) {
        std::vector<double> series;
        series.reserve(path.frames.size() * n_gaps);
        for (const auto& frame : path.frames)
            for (std::size_t g = 0; g < n_gaps; ++g)
                series.push_back(frame.positions[g + 1] - frame.positions[g]);
        return series;
    };
    const auto series = simulate_reduce_vec(profile_spec(c), params, record_times, 1,
                                            RngSpec{c.master_seed}, reduce, nullptr,
                                            c.workers)[0];

    std::string csv = "gap_index,rate,theory_mean,est_mean,ci_halfwidth\n";
    const std::size_t n_samples = series.size() / n_gaps;
    for (std::size_t g = 1; g <= n_gaps; ++g) {
        double rate;
        if (c.theory == "finite") {
            rate = 2.0 * c.gamma *
                   (1.0 - static_cast<double>(g) / static_cast<double>(params.n_particles));
        } else if (c.theory == "product") {
            rate = 2.0 * c.gamma + static_cast<double>(g) * c.a;
        } else {
            throw CLI::ValidationError("theory", "unknown theory: " + c.theory);
        }
        std::vector<double> gap_series(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k)
            gap_series[k] = series[k * n_gaps + (g - 1)];
        const BatchMeanResult bm = batch_mean_ci(gap_series, static_cast<std::size_t>(c.batches));
        csv += io::csv_row({std::to_string(g), d2s(rate), d2s(rate > 0 ? 1.0 / rate : 0.0),
                            d2s(bm.mean), d2s(bm.halfwidth)});
    }
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "gaps.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_field(const RunConfig& c) {
    auto reduce = [&](const SimPath& path) {
        FieldGrid grid;
        if (c.field == "count") {
            grid = count_field(path, c.eps, c.t_grid, c.x_grid);
        } else if (c.field == "ranked") {
            grid = ranked_field(path, c.eps, c.t_grid, c.x_grid);
        } else {
            const ChiTriple triple = chi_triple(path, c.eps, c.t_grid, c.x_grid);
            if (c.field == "chi")
                grid = triple.chi;
            else if (c.field == "chi_tilde")
                grid = triple.chi_tilde;
            else if (c.field == "chi_check")
                grid = triple.chi_check;
            else
                throw CLI::ValidationError("field", "unknown field: " + c.field);
        }
        return grid.values;
    };
    const auto values = simulate_reduce_vec(profile_spec(c), model_params(c),
                                            effective_record_times(c), c.replicas,
                                            RngSpec{c.master_seed}, reduce, nullptr, c.workers);
    std::string csv = "replica,t,x,value\n";
    for (std::size_t r = 0; r < values.size(); ++r)
        for (std::size_t ti = 0; ti < c.t_grid.size(); ++ti)
            for (std::size_t xi = 0; xi < c.x_grid.size(); ++xi)
                csv += io::csv_row({std::to_string(r), d2s(c.t_grid[ti]), d2s(c.x_grid[xi]),
                                    d2s(values[r][ti * c.x_grid.size() + xi])});
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "field.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_gpath(const RunConfig& c) {
    auto reduce = [&](const SimPath& path) {
        return g_path_estimator(path, c.eps, c.x, c.t_grid);
    };
    const auto values = simulate_reduce_vec(profile_spec(c), model_params(c),
                                            effective_record_times(c), c.replicas,
                                            RngSpec{c.master_seed}, reduce, nullptr, c.workers);
    std::string csv = "replica,t,x,value\n";
    for (std::size_t r = 0; r < values.size(); ++r)
        for (std::size_t ti = 0; ti < c.t_grid.size(); ++ti)
            csv += io::csv_row(
                {std::to_string(r), d2s(c.t_grid[ti]), d2s(c.x), d2s(values[r][ti])});
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "gpath.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_kernels(const RunConfig& c) {
    std::string csv = "identity,params,residual\n";
    const double grid[3] = {0.5, 1.0, 2.0};
    const double tgrid[3] = {0.1, 1.0, 5.0};
    for (double a : grid) {
        for (double t : tgrid) {
            for (double v : grid) {
                const std::string params_str =
                    "a=" + d2s(a) + ";t=" + d2s(t) + ";v=" + d2s(v);
                const double r1 = log_substituted_quadrature(
                                      [&](double z) { return kn::hatq_kernel(a, t, z, v); }) -
                                  1.0;
                csv += io::csv_row({"int_qhat_dz", params_str, d2s(r1)});
                const double r2 = log_substituted_quadrature(
                                      [&](double y) { return kn::hatq_kernel(a, t, v, y); }) -
                                  1.0;
                csv += io::csv_row({"int_qhat_dy", params_str, d2s(r2)});
                const double r3 = log_substituted_quadrature(
                                      [&](double z) { return kn::q_kernel(a, t, z, v); }) -
                                  1.0;
                csv += io::csv_row({"int_q_dz", params_str, d2s(r3)});
                const double target = std::exp(a * a * t);
                const double r4 = (log_substituted_quadrature(
                                       [&](double y) { return kn::q_kernel(a, t, v, y); },
                                       1e-8 * target) -
                                   target) /
                                  target;
                csv += io::csv_row({"int_q_dy_rel", params_str, d2s(r4)});
                const double r5 = log_substituted_quadrature(
                                      [&](double y) { return kn::psi(a, v, t, y); }) -
                                  v;
                csv += io::csv_row({"int_psi_dy", params_str, d2s(r5)});
            }
        }
    }
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "kernels.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_limitcov(const RunConfig& c) {
    const LimitCovariance cov(c.a, c.gamma);
    std::string csv = "kind,t,tp,x,xp,value\n";
    for (double x : c.x_grid) {
        for (double t : c.t_grid) {
            for (double tp : c.t_grid) {
                csv += io::csv_row({"cov_w_quad", d2s(t), d2s(tp), d2s(x), d2s(x),
                                    d2s(cov.cov_w(t, x, tp, x))});
                csv += io::csv_row({"cov_w_closed", d2s(t), d2s(tp), d2s(x), d2s(x),
                                    d2s(cov.cov_w_closed(t, tp, x))});
                csv += io::csv_row({"cov_m_quad", d2s(t), d2s(tp), d2s(x), d2s(x),
                                    d2s(cov.cov_m(t, x, tp, x))});
                csv += io::csv_row({"cov_m_closed", d2s(t), d2s(tp), d2s(x), d2s(x),
                                    d2s(cov.cov_m_closed(t, tp, x))});
                csv += io::csv_row(
                    {"cov_g", d2s(t), d2s(tp), d2s(x), d2s(x), d2s(cov.cov_g(t, tp, x))});
            }
            csv += io::csv_row(
                {"var_u", d2s(t), d2s(t), d2s(x), d2s(x), d2s(cov.var_u(t, x))});
        }
    }
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "limitcov.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_limitsample(const RunConfig& c) {
    const LimitCovariance cov(c.a, c.gamma);
    std::string csv = "replica,time,value\n";
    for (std::int64_t r = 0; r < c.replicas; ++r) {
        const auto values = sample_limit_g(cov, c.x, c.t_grid, RngSpec{c.master_seed},
                                           static_cast<std::uint32_t>(r));
        for (std::size_t ti = 0; ti < c.t_grid.size(); ++ti)
            csv += io::csv_row({std::to_string(r), d2s(c.t_grid[ti]), d2s(values[ti])});
    }
    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "limitsample.csv", csv);
    manifest.write(c.out_dir);
    return 0;
}

int cmd_lowest(const RunConfig& c) {
    ModelParams params = model_params(c);
    ProfileSpec initial;
    initial.kind = ProfileKind::tilde_nu_a_gamma;
    initial.params = params;
    const std::vector<double> record_times{params.horizon};
    auto reduce = [&](const SimPath& path) { return lowest_statistic(path, c.a); };
    const auto samples = simulate_reduce(initial, params, record_times, c.replicas,
                                         RngSpec{c.master_seed}, reduce, nullptr, c.workers);
    const LowestLimit limit(c.gamma, c.a);
    const KSResult ks = ks_test(samples, [&](double z) { return limit.cdf_diff(z); });

    std::string samples_csv = "replica,value\n";
    for (std::size_t r = 0; r < samples.size(); ++r)
        samples_csv += io::csv_row({std::to_string(r), d2s(samples[r])});
    std::string ks_csv = "statistic,p_value,n\n";
    ks_csv += io::csv_row({d2s(ks.statistic), d2s(ks.p_value), std::to_string(ks.n)});

    io::ManifestWriter manifest(config_to_json(c));
    manifest.add_artifact(c.out_dir, "lowest_samples.csv", samples_csv);
    manifest.add_artifact(c.out_dir, "lowest_ks.csv", ks_csv);
    manifest.write(c.out_dir);
    std::cout << "statistic," << d2s(ks.statistic) << ",p," << d2s(ks.p_value) << "\n";
    return 0;
}

int cmd_verify(const RunConfig& c) {
    const auto ids = acceptance::criteria_for_suite(c.suite);
    io::ManifestWriter manifest(config_to_json(c));
    std::string csv = "criterion,name,pass,detail,seconds\n";
    bool all_pass = true;
    for (int id : ids) {
        const auto result = acceptance::run_criterion(id, c.workers);
        std::cout << acceptance::format_result(result) << "\n" << std::flush;
        all_pass = all_pass && result.pass;
        manifest.set_suite_result("criterion_" + std::to_string(id), result.pass);
        std::string safe_detail = result.detail;
        for (char& ch : safe_detail)
            if (ch == ',') ch = ';';
        csv += io::csv_row({std::to_string(result.id), result.name,
                            result.pass ? "pass" : "fail", safe_detail,
                            d2s(result.seconds)});
    }
    manifest.add_artifact(c.out_dir, "verify.csv", csv);
    manifest.write(c.out_dir);
    return all_pass ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"atlaslab: simulation and verification of rank-based diffusion fluctuations"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig flags;  // values written by CLI11; only consulted when the flag was set

    struct FieldCopy {
        CLI::Option* option;
        std::function<void(RunConfig&, const RunConfig&)> copy;
    };
    std::vector<FieldCopy> copies;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        auto reg = [&](CLI::Option* opt, auto member) {
            copies.push_back({opt, [member](RunConfig& dst, const RunConfig& src) {
                                  dst.*member = src.*member;
                              }});
        };
        reg(sub->add_option("--a", flags.a, "density growth rate"), &RunConfig::a);
        reg(sub->add_option("--gamma", flags.gamma, "lowest-particle drift"), &RunConfig::gamma);
        reg(sub->add_option("--n", flags.n_particles, "particle count"),
            &RunConfig::n_particles);
        reg(sub->add_option("--dt", flags.dt, "time step"), &RunConfig::dt);
        reg(sub->add_option("--T,--horizon", flags.horizon, "time horizon"),
            &RunConfig::horizon);
        reg(sub->add_option("--profile", flags.profile, "initial profile"),
            &RunConfig::profile);
        reg(sub->add_option("--eps", flags.eps, "field scale epsilon"), &RunConfig::eps);
        reg(sub->add_option("--t-grid", flags.t_grid, "time grid"), &RunConfig::t_grid);
        reg(sub->add_option("--x-grid", flags.x_grid, "space grid"), &RunConfig::x_grid);
        reg(sub->add_option("--record-times", flags.record_times, "frame record times"),
            &RunConfig::record_times);
        reg(sub->add_option("--replicas", flags.replicas, "replica count"),
            &RunConfig::replicas);
        reg(sub->add_option("--seed", flags.master_seed, "master seed"),
            &RunConfig::master_seed);
        reg(sub->add_option("--out", flags.out_dir, "output directory"), &RunConfig::out_dir);
        reg(sub->add_option("--suite", flags.suite, "acceptance suite selection"),
            &RunConfig::suite);
        reg(sub->add_option("--workers", flags.workers, "worker threads (0 = hardware)"),
            &RunConfig::workers);
        reg(sub->add_option("--x", flags.x, "space coordinate for gpath"), &RunConfig::x);
        reg(sub->add_option("--field", flags.field, "field kind"), &RunConfig::field);
        reg(sub->add_option("--burnin", flags.burnin, "burn-in time"), &RunConfig::burnin);
        reg(sub->add_option("--batches", flags.batches, "batch count"), &RunConfig::batches);
        reg(sub->add_option("--thin", flags.thin, "record every thin-th step"),
            &RunConfig::thin);
        reg(sub->add_option("--theory", flags.theory, "gap theory: product|finite"),
            &RunConfig::theory);
    };

    std::map<std::string, std::function<int(const RunConfig&)>> handlers{
        {"profile", cmd_profile},     {"simulate", cmd_simulate},
        {"gaps", cmd_gaps},           {"field", cmd_field},
        {"gpath", cmd_gpath},         {"kernels", cmd_kernels},
        {"limitcov", cmd_limitcov},   {"limitsample", cmd_limitsample},
        {"lowest", cmd_lowest},       {"verify", cmd_verify},
    };
    const std::map<std::string, std::string> descriptions{
        {"profile", "sample an initial profile to CSV"},
        {"simulate", "integrate replica paths and write frames"},
        {"gaps", "long-run gap means against the stationary rates"},
        {"field", "fluctuation fields on a (t,x) grid"},
        {"gpath", "recentered bulk-rank trajectories"},
        {"kernels", "kernel identity self-check table"},
        {"limitcov", "limit covariance tables"},
        {"limitsample", "exact samples of the limit process"},
        {"lowest", "lowest-particle statistic and KS against the limit law"},
        {"verify", "run acceptance criteria (exit 0 iff all pass)"},
    };
    for (auto& [name, handler] : handlers) add_common(app.add_subcommand(name, descriptions.at(name)));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // Build the effective config: defaults, then file, then explicit flags.
    RunConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read config file: " << config_path << "\n";
            return 2;
        }
        json j;
        try {
            in >> j;
            RunConfig file_config = config_from_json(j);
            config = file_config;
        } catch (const std::exception& e) {
            std::cerr << "bad config file: " << e.what() << "\n";
            return 2;
        }
    }
    for (const auto& fc : copies)
        if (fc.option->count() > 0) fc.copy(config, flags);
    if (const char* env_out = std::getenv("ATLASLAB_OUT_DIR");
        env_out != nullptr && config.out_dir == "out") {
        bool out_flag_set = false;
        for (const auto& fc : copies)
            if (fc.option->get_name() == "--out" && fc.option->count() > 0) out_flag_set = true;
        if (!out_flag_set) config.out_dir = env_out;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        return handlers.at(sub->get_name())(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace atlas::cli
