#include "atlas/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "atlas/dynamics.hpp"
#include "atlas/estimators.hpp"
#include "atlas/kernels.hpp"
#include "atlas/limit_field.hpp"
#include "atlas/quadrature.hpp"
#include "atlas/special_functions.hpp"
#include "atlas/stats.hpp"

namespace atlas::acceptance {

namespace kn = atlas::kernels;

namespace {

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

struct Check {
    bool pass = true;
    double worst = 0.0;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
    void track(double value) { worst = std::max(worst, value); }
};

double halton(std::uint64_t index, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    for (std::uint64_t i = index + 1; i > 0; i /= base) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
    }
    return r;
}

double log_uniform(double u, double lo, double hi) {
    return lo * std::exp(u * std::log(hi / lo));
}

// ---------------------------------------------------------------------------
// Criterion 1: kernel mass identities.
// ---------------------------------------------------------------------------
CriterionResult criterion_kernel_masses(int) {
    Check chk;
    const double grid[3] = {0.5, 1.0, 2.0};
    const double tgrid[3] = {0.1, 1.0, 5.0};
    for (double a : grid) {
        for (double t : tgrid) {
            for (double v : grid) {
                const double int_hatq_dz = log_substituted_quadrature(
                    [&](double z) { return kn::hatq_kernel(a, t, z, v); });
                chk.track(std::abs(int_hatq_dz - 1.0));
                chk.require(std::abs(int_hatq_dz - 1.0) <= 1e-8,
                            fmt("int qhat dz at a=%g t=%g y=%g: %.3e", a, t, v,
                                int_hatq_dz - 1.0));

                const double int_hatq_dy = log_substituted_quadrature(
                    [&](double y) { return kn::hatq_kernel(a, t, v, y); });
                chk.track(std::abs(int_hatq_dy - 1.0));
                chk.require(std::abs(int_hatq_dy - 1.0) <= 1e-8,
                            fmt("int qhat dy at a=%g t=%g z=%g: %.3e", a, t, v,
                                int_hatq_dy - 1.0));

                const double int_q_dz = log_substituted_quadrature(
                    [&](double z) { return kn::q_kernel(a, t, z, v); });
                chk.track(std::abs(int_q_dz - 1.0));
                chk.require(std::abs(int_q_dz - 1.0) <= 1e-8,
                            fmt("int q dz at a=%g t=%g y=%g: %.3e", a, t, v, int_q_dz - 1.0));

                const double target = std::exp(a * a * t);
                const double int_q_dy = log_substituted_quadrature(
                    [&](double y) { return kn::q_kernel(a, t, v, y); }, 1e-8 * target);
                chk.require(std::abs(int_q_dy - target) / target <= 1e-6,
                            fmt("int q dy at a=%g t=%g z=%g: rel %.3e", a, t, v,
                                (int_q_dy - target) / target));

                const double int_psi = log_substituted_quadrature(
                    [&](double y) { return kn::psi(a, v, t, y); });
                chk.track(std::abs(int_psi - v));
                chk.require(std::abs(int_psi - v) <= 1e-8,
                            fmt("int Psi dy at a=%g t=%g x=%g: %.3e", a, t, v, int_psi - v));
            }
        }
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("max abs residual %.3e", chk.worst) : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 2: dPsi/dy = -q_t(y, x) against central differences.
// ---------------------------------------------------------------------------
CriterionResult criterion_derivative_identity(int) {
    Check chk;
    for (int i = 0; i < 100; ++i) {
        const double a = log_uniform(halton(i, 7), 0.5, 2.0);
        const double t = log_uniform(halton(i, 2), 0.25, 4.0);
        const double x = log_uniform(halton(i, 3), 0.5, 2.0);
        const double y = log_uniform(halton(i, 5), 0.5, 2.0);
        const double h = 1e-4 * y;
        const double fd = (kn::psi(a, x, t, y + h) - kn::psi(a, x, t, y - h)) / (2.0 * h);
        const double q = kn::q_kernel(a, t, y, x);
        const double rel = std::abs(fd + q) / q;
        chk.track(rel);
        chk.require(rel <= 1e-5,
                    fmt("point %d (a=%.3f t=%.3f x=%.3f y=%.3f): rel %.3e", i, a, t, x, y, rel));
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("max rel deviation %.3e over 100 points", chk.worst) : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 3: quadrature covariances against the closed forms.
// ---------------------------------------------------------------------------
CriterionResult criterion_covariance_closed_forms(int) {
    Check chk;
    const double pairs[2][2] = {{1.0, 1.0}, {2.0, 0.5}};
    const double ts[3] = {0.25, 1.0, 4.0};
    for (const auto& ax : pairs) {
        const LimitCovariance cov(ax[0]);
        const double x = ax[1];
        for (double t : ts) {
            for (double tp : ts) {
                const double w_quad = cov.cov_w(t, x, tp, x);
                const double w_closed = cov.cov_w_closed(t, tp, x);
                const double w_rel = std::abs(w_quad - w_closed) / std::abs(w_closed);
                chk.track(w_rel);
                chk.require(w_rel <= 1e-5, fmt("cov_w a=%g x=%g t=%g t'=%g rel %.3e", ax[0], x,
                                               t, tp, w_rel));

                const double m_quad = cov.cov_m(t, x, tp, x);
                const double m_closed = cov.cov_m_closed(t, tp, x);
                const double m_rel = std::abs(m_quad - m_closed) / std::abs(m_closed);
                chk.track(m_rel);
                chk.require(m_rel <= 1e-5, fmt("cov_m a=%g x=%g t=%g t'=%g rel %.3e", ax[0], x,
                                               t, tp, m_rel));
            }
            const double vu = cov.var_u(t, x);
            chk.require(std::abs(vu - x) <= 1e-6,
                        fmt("var_u a=%g x=%g t=%g: |dev| %.3e", ax[0], x, t, std::abs(vu - x)));
        }
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("max rel deviation %.3e", chk.worst) : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 4: finite-N equilibrium gap means (N = 5, gamma = 1).
// Pinned seed 404.
// ---------------------------------------------------------------------------
CriterionResult criterion_finite_n_equilibrium(int workers) {
    const double burn_in = 200.0, horizon = 2000.0;
    const int thin = 10;

    ModelParams params;
    params.a = 1.0;
    params.gamma = 1.0;
    params.n_particles = 5;
    params.dt = 1e-3;
    params.horizon = horizon;

    ProfileSpec initial;
    initial.kind = ProfileKind::tilde_nu_a_gamma;
    initial.params = params;

    std::vector<double> record_times;
    const double step = params.dt * thin;
    const auto n_records = static_cast<std::size_t>((horizon - burn_in) / step + 1.5);
    for (std::size_t k = 0; k < n_records; ++k)
        record_times.push_back(burn_in + static_cast<double>(k) * step);

    const RngSpec rng{404};
    const std::size_t n_gaps = 4;
    auto reduce = [&](const SimPath& path) {
        std::vector<double> series;
        series.reserve(path.frames.size() * n_gaps);
        for (const auto& frame : path.frames)
            for (std::size_t g = 0; g < n_gaps; ++g)
                series.push_back(frame.positions[g + 1] - frame.positions[g]);
        return series;
    };
    const auto series =
        simulate_reduce_vec(initial, params, record_times, 1, rng, reduce, nullptr, workers)[0];

    const double targets[4] = {0.625, 5.0 / 6.0, 1.25, 2.5};  // 1 / (2 gamma (1 - i/N))
    Check chk;
    std::string summary;
    const std::size_t n_samples = series.size() / n_gaps;
    for (std::size_t g = 0; g < n_gaps; ++g) {
        std::vector<double> gap_series(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k) gap_series[k] = series[k * n_gaps + g];
        const BatchMeanResult bm = batch_mean_ci(gap_series, 20);
        const double dev = std::abs(bm.mean - targets[g]);
        chk.require(dev <= bm.halfwidth, fmt("gap %zu: mean %.4f vs %.4f, CI +-%.4f", g + 1,
                                             bm.mean, targets[g], bm.halfwidth));
        summary += fmt("%s%.4f(+-%.4f|%.4f)", g ? " " : "", bm.mean, bm.halfwidth, targets[g]);
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? "gap means " + summary : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 5: stationarity of the nu profile at T = 1 (seed 505).
// ---------------------------------------------------------------------------
CriterionResult criterion_stationarity(int workers) {
    Check chk;
    std::string summary;
    for (double gamma : {0.0, 0.5}) {
        ModelParams params;
        params.a = 1.0;
        params.gamma = gamma;
        params.n_particles = 2000;
        params.dt = 1e-3;
        params.horizon = 1.0;

        ProfileSpec initial;
        initial.kind = ProfileKind::nu_a_gamma;
        initial.params = params;

        const std::vector<double> record_times{1.0};
        const RngSpec rng{505};
        IntegratorReport report;
        auto reduce = [&](const SimPath& path) {
            const ParticleConfig& last = path.frames.back();
            const double half_at = params.a * last.time / 2.0;
            const double y0 = std::exp(params.a * (last.positions[0] + half_at));
            const double y99 = std::exp(params.a * (last.positions[99] + half_at));
            const double y100 = std::exp(params.a * (last.positions[100] + half_at));
            return std::vector<double>{y0, y100 - y99};
        };
        const auto rows = simulate_reduce_vec(initial, params, record_times, 2000, rng, reduce,
                                              &report, workers);
        std::vector<double> y0(rows.size()), gap(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            y0[i] = rows[i][0];
            gap[i] = rows[i][1];
        }
        const double shape = 1.0 + 2.0 * gamma / params.a;
        const KSResult ks_y0 =
            ks_test(y0, [&](double y) { return y <= 0.0 ? 0.0 : sf::reg_gamma_p(shape, y); });
        const KSResult ks_gap =
            ks_test(gap, [](double g) { return g <= 0.0 ? 0.0 : -std::expm1(-g); });
        chk.require(ks_y0.p_value >= 0.01, fmt("gamma=%g lowest-particle KS p=%.4f < 0.01",
                                               gamma, ks_y0.p_value));
        chk.require(ks_gap.p_value >= 0.01,
                    fmt("gamma=%g bulk Y-gap KS p=%.4f < 0.01", gamma, ks_gap.p_value));
        chk.require(report.argmin_top_fraction == 0.0, "truncation bound the minimum");
        summary += fmt("%sgamma=%g: pY0=%.3f pGap=%.3f", gamma > 0 ? " " : "", gamma,
                       ks_y0.p_value, ks_gap.p_value);
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? summary : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 6: lowest-particle limit law at T = 8 (seed 1234).
// N must comfortably exceed e^{a T / 2}: the minimum migrates to about
// -a T / 2 while the truncation top sits at log N, and the missing particles
// above the top otherwise reach the minimum with a few percent probability
// (measured: mean bias +0.13 at N = 2000 for gamma = 0.5, +0.05 at N = 8000,
// dt-independent). N = 20000 puts the truncation bias well below the KS
// resolution at 2000 replicas. gamma = 0 increments are exact Brownian sums
// at any step size, so that leg uses a coarser dt.
// ---------------------------------------------------------------------------
CriterionResult criterion_lowest_limit(int workers) {
    Check chk;
    std::string summary;
    const double a = 1.0;
    for (double gamma : {0.0, 0.5}) {
        ModelParams params;
        params.a = a;
        params.gamma = gamma;
        params.n_particles = 20000;
        params.dt = gamma == 0.0 ? 1e-2 : 2e-3;
        params.horizon = 8.0;

        ProfileSpec initial;
        initial.kind = ProfileKind::tilde_nu_a_gamma;
        initial.params = params;

        const std::vector<double> record_times{8.0};
        const RngSpec rng{1234};
        auto reduce = [&](const SimPath& path) { return lowest_statistic(path, a); };
        const auto samples = simulate_reduce(initial, params, record_times, 2000, rng, reduce,
                                             nullptr, workers);
        KSResult ks;
        if (gamma == 0.0) {
            ks = ks_test(samples, [&](double z) { return 1.0 / (1.0 + std::exp(-a * z)); });
        } else {
            const LowestLimit limit(gamma, a);
            ks = ks_test(samples, [&](double z) { return limit.cdf_diff(z); });
        }
        chk.require(ks.p_value >= 0.01,
                    fmt("gamma=%g KS D=%.4f p=%.4f < 0.01", gamma, ks.statistic, ks.p_value));
        summary += fmt("%sgamma=%g: D=%.4f p=%.3f", gamma > 0 ? " " : "", gamma, ks.statistic,
                       ks.p_value);
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? summary : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criteria 7 and 9b share the particle-simulated G^x ensemble
// (a = 1, x = 1, eps = 1e-4, N = 2000, 1000 replicas, seed 707).
// ---------------------------------------------------------------------------
struct GEnsemble {
    std::vector<double> times;       // dense grid + {0.5, 1.0}
    std::size_t dense_count = 0;     // leading uniform section usable for lags
    std::vector<std::vector<double>> paths;
};

GEnsemble simulate_g_ensemble(int workers) {
    ModelParams params;
    params.a = 1.0;
    params.gamma = 0.0;
    params.n_particles = 2000;
    params.dt = 1e-3;
    params.horizon = 1.0;

    ProfileSpec initial;
    initial.kind = ProfileKind::nu_a_gamma;
    initial.params = params;

    GEnsemble ens;
    for (int k = 0; k <= 256; ++k) ens.times.push_back(static_cast<double>(k) * params.dt);
    ens.dense_count = ens.times.size();
    ens.times.push_back(0.5);
    ens.times.push_back(1.0);

    const RngSpec rng{707};
    const double eps = 1e-4;
    auto reduce = [&](const SimPath& path) {
        return g_path_estimator(path, eps, 1.0, path.times);
    };
    ens.paths = simulate_reduce_vec(initial, params, ens.times, 1000, rng, reduce, nullptr,
                                    workers);
    return ens;
}

CriterionResult criterion_g_covariance(int workers) {
    const GEnsemble ens = simulate_g_ensemble(workers);
    const LimitCovariance cov(1.0);
    const double probes[3] = {0.25, 0.5, 1.0};
    std::size_t idx[3];
    for (int i = 0; i < 3; ++i) {
        idx[i] = 0;
        while (std::abs(ens.times[idx[i]] - probes[i]) > 1e-12) ++idx[i];
    }
    Check chk;
    std::string summary;
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            std::vector<double> xs(ens.paths.size()), ys(ens.paths.size());
            for (std::size_t r = 0; r < ens.paths.size(); ++r) {
                xs[r] = ens.paths[r][idx[i]];
                ys[r] = ens.paths[r][idx[j]];
            }
            const CovEstimate est = empirical_cov(xs, ys);
            const double target = cov.cov_g(probes[i], probes[j], 1.0);
            const double dev = std::abs(est.estimate - target);
            chk.require(dev <= 4.0 * est.standard_error,
                        fmt("cov(%.2f,%.2f): est %.4f vs %.4f, 4SE %.4f", probes[i], probes[j],
                            est.estimate, target, 4.0 * est.standard_error));
            if (i == j)
                summary += fmt("%svar(%.2g)=%.4f~%.4f", summary.empty() ? "" : " ", probes[i],
                               est.estimate, target);
        }
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? summary : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: variance saturation of G^x at large time.
// ---------------------------------------------------------------------------
CriterionResult criterion_variance_saturation(int) {
    const LimitCovariance cov(1.0);
    const double closed = cov.cov_g(50.0, 50.0, 1.0);
    const double target = 2.0;
    Check chk;
    chk.require(std::abs(closed - target) <= 0.01 * target,
                fmt("closed form %.6f deviates from 2 by more than 1%%", closed));

    // Exact sampler at the same point.
    const RngSpec rng{808};
    const std::vector<double> grid{50.0};
    double sum = 0.0, sum2 = 0.0;
    const std::size_t n = 1000000;
    const double sd = std::sqrt(closed);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = sd * normal_at(rng, StreamKind::limit, 0, 0, i);
        sum += g;
        sum2 += g * g;
    }
    const double var = (sum2 - sum * sum / static_cast<double>(n)) / (static_cast<double>(n) - 1);
    chk.require(std::abs(var - target) <= 0.01 * target,
                fmt("sampled variance %.6f deviates from 2 by more than 1%%", var));
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("closed %.6f, sampled %.6f (seed 808)", closed, var) : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 9: Hurst-1/4 structure exponent, exact sampler and particles.
// Seeds 909 (exact) and 707 (shared ensemble).
// ---------------------------------------------------------------------------
CriterionResult criterion_hurst(int workers) {
    Check chk;
    const LimitCovariance cov(1.0);
    std::vector<double> grid;
    for (int k = 0; k <= 256; ++k) grid.push_back(static_cast<double>(k) * 1e-3);

    // Exact Gaussian paths: factor the covariance once, then one
    // matrix-vector product per path.
    const std::size_t live = grid.size() - 1;  // t = 0 is deterministic
    std::vector<double> matrix(live * live);
    for (std::size_t i = 0; i < live; ++i)
        for (std::size_t j = 0; j < live; ++j)
            matrix[i * live + j] = cov.cov_g(grid[i + 1], grid[j + 1], 1.0);
    const std::vector<double> chol = jittered_cholesky(std::move(matrix), live);

    const RngSpec rng{909};
    const std::size_t n_paths = 10000;
    std::vector<std::vector<double>> exact_paths(n_paths);
    std::vector<double> z(live);
    for (std::size_t p = 0; p < n_paths; ++p) {
        for (std::size_t i = 0; i < live; ++i)
            z[i] = normal_at(rng, StreamKind::limit, static_cast<std::uint32_t>(p), 0, i);
        std::vector<double> path(grid.size(), 0.0);
        for (std::size_t i = 0; i < live; ++i) {
            double s = 0.0;
            const double* row = chol.data() + i * live;
            for (std::size_t j = 0; j <= i; ++j) s += row[j] * z[j];
            path[i + 1] = s;
        }
        exact_paths[p] = std::move(path);
    }
    const SlopeFit exact_fit = structure_exponent(exact_paths, grid, 1e-3, 1e-1);
    chk.require(std::abs(exact_fit.slope - 0.5) <= 0.03,
                fmt("exact-sampler slope %.4f outside 0.5 +- 0.03", exact_fit.slope));

    const GEnsemble ens = simulate_g_ensemble(workers);
    std::vector<double> dense_times(ens.times.begin(),
                                    ens.times.begin() + static_cast<long>(ens.dense_count));
    std::vector<std::vector<double>> dense_paths(ens.paths.size());
    for (std::size_t r = 0; r < ens.paths.size(); ++r)
        dense_paths[r].assign(ens.paths[r].begin(),
                              ens.paths[r].begin() + static_cast<long>(ens.dense_count));
    const SlopeFit particle_fit = structure_exponent(dense_paths, dense_times, 1e-3, 1e-1);
    chk.require(std::abs(particle_fit.slope - 0.5) <= 0.1,
                fmt("particle slope %.4f outside 0.5 +- 0.1", particle_fit.slope));

    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("exact slope %.4f, particle slope %.4f", exact_fit.slope,
                              particle_fit.slope)
                        : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 10: fBM(1/4) interpolation of H^x_a at a = 0.01.
// ---------------------------------------------------------------------------
CriterionResult criterion_fbm_interpolation(int) {
    const LimitCovariance cov(0.01);
    const double ts[3] = {0.25, 1.0, 4.0};
    Check chk;
    for (double t : ts) {
        for (double tp : ts) {
            const double h = cov.cov_h(t, tp, 1.0);
            const double target = fbm_quarter_cov(t, tp);
            const double rel = std::abs(h - target) / target;
            chk.track(rel);
            chk.require(rel <= 0.02,
                        fmt("cov_H(%.2f,%.2f) rel deviation %.4f > 2%%", t, tp, rel));
        }
    }
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("max rel deviation %.4f", chk.worst) : chk.detail;
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 11: Poisson structure of the geometric view at t = 1 (seed 1111).
// gamma = 0, so any dt gives the exact law; counts are pooled over replicas.
// ---------------------------------------------------------------------------
CriterionResult criterion_poisson_structure(int workers) {
    ModelParams params;
    params.a = 1.0;
    params.gamma = 0.0;
    params.n_particles = 2000;
    params.dt = 1e-2;
    params.horizon = 1.0;

    ProfileSpec initial;
    initial.kind = ProfileKind::nu_a_gamma;
    initial.params = params;

    const std::vector<double> record_times{1.0};
    const RngSpec rng{1111};
    auto reduce = [&](const SimPath& path) {
        const ParticleConfig& last = path.frames.back();
        const double half_at = params.a * last.time / 2.0;
        std::vector<double> counts(10, 0.0);
        for (double pos : last.positions) {
            const double y = std::exp(params.a * (pos + half_at));
            if (y > 10.0) break;
            counts[static_cast<std::size_t>(std::min(9.0, std::floor(y)))] += 1.0;
        }
        return counts;
    };
    const auto per_replica = simulate_reduce_vec(initial, params, record_times, 1000, rng,
                                                 reduce, nullptr, workers);
    std::vector<std::int64_t> counts;
    counts.reserve(per_replica.size() * 10);
    for (const auto& row : per_replica)
        for (double c : row) counts.push_back(static_cast<std::int64_t>(c));
    const double p = chi_square_poisson(counts, 1.0);
    CriterionResult r;
    r.pass = p >= 0.01;
    r.detail = fmt("chi-square p=%.4f over %zu unit-interval counts", p, counts.size());
    return r;
}

// ---------------------------------------------------------------------------
// Criterion 12: chi-triple sup-differences shrink with eps (seeds 1201-1203).
// ---------------------------------------------------------------------------
CriterionResult criterion_chi_triple_trend(int workers) {
    ModelParams params;
    params.a = 1.0;
    params.gamma = 0.0;
    params.n_particles = 2000;
    params.dt = 1e-2;
    params.horizon = 1.0;

    ProfileSpec initial;
    initial.kind = ProfileKind::nu_a_gamma;
    initial.params = params;

    std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> x_grid;
    for (double x = 0.5; x <= 3.0 + 1e-9; x += 0.25) x_grid.push_back(x);

    auto sup_diffs = [&](double eps, std::uint64_t seed) {
        const RngSpec rng{seed};
        auto reduce = [&](const SimPath& path) {
            const ChiTriple triple = chi_triple(path, eps, t_grid, x_grid);
            double d1 = 0.0, d2 = 0.0;
            for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
                for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
                    d1 = std::max(d1, std::abs(triple.chi.at(0, ti, xi) -
                                               triple.chi_tilde.at(0, ti, xi)));
                    d2 = std::max(d2, std::abs(triple.chi_tilde.at(0, ti, xi) -
                                               triple.chi_check.at(0, ti, xi)));
                }
            }
            return std::vector<double>{d1, d2};
        };
        return simulate_reduce_vec(initial, params, t_grid, 1, rng, reduce, nullptr, workers)[0];
    };

    const std::uint64_t seeds[3] = {1201, 1202, 1203};
    std::vector<double> coarse1, coarse2, fine1, fine2;
    for (std::uint64_t seed : seeds) {
        const auto c = sup_diffs(1e-2, seed);
        const auto f = sup_diffs(1e-4, seed);
        coarse1.push_back(c[0]);
        coarse2.push_back(c[1]);
        fine1.push_back(f[0]);
        fine2.push_back(f[1]);
    }
    auto median3 = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[1];
    };
    const double m_c1 = median3(coarse1), m_f1 = median3(fine1);
    const double m_c2 = median3(coarse2), m_f2 = median3(fine2);
    Check chk;
    chk.require(m_c1 > m_f1, fmt("|chi-chi~| medians: eps=1e-2 %.4f <= eps=1e-4 %.4f", m_c1,
                                 m_f1));
    chk.require(m_c2 > m_f2, fmt("|chi~-chi^| medians: eps=1e-2 %.4f <= eps=1e-4 %.4f", m_c2,
                                 m_f2));
    CriterionResult r;
    r.pass = chk.pass;
    r.detail = chk.pass ? fmt("|chi-chi~|: %.3f -> %.3f; |chi~-chi^|: %.3f -> %.3f", m_c1, m_f1,
                              m_c2, m_f2)
                        : chk.detail;
    return r;
}

}  // namespace

const char* criterion_name(int id) {
    switch (id) {
        case 1: return "kernel mass identities";
        case 2: return "mollifier derivative identity";
        case 3: return "closed-form covariances";
        case 4: return "finite-N equilibrium gaps";
        case 5: return "stationarity of the inhomogeneous profile";
        case 6: return "lowest-particle limit law";
        case 7: return "ranked-particle covariance";
        case 8: return "variance saturation";
        case 9: return "Hurst-1/4 structure exponent";
        case 10: return "fBM(1/4) interpolation";
        case 11: return "Poisson structure of the geometric view";
        case 12: return "chi-triple consistency trend";
        default: throw std::invalid_argument("unknown criterion id");
    }
}

CriterionResult run_criterion(int id, int workers) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    switch (id) {
        case 1: result = criterion_kernel_masses(workers); break;
        case 2: result = criterion_derivative_identity(workers); break;
        case 3: result = criterion_covariance_closed_forms(workers); break;
        case 4: result = criterion_finite_n_equilibrium(workers); break;
        case 5: result = criterion_stationarity(workers); break;
        case 6: result = criterion_lowest_limit(workers); break;
        case 7: result = criterion_g_covariance(workers); break;
        case 8: result = criterion_variance_saturation(workers); break;
        case 9: result = criterion_hurst(workers); break;
        case 10: result = criterion_fbm_interpolation(workers); break;
        case 11: result = criterion_poisson_structure(workers); break;
        case 12: result = criterion_chi_triple_trend(workers); break;
        default: throw std::invalid_argument("criterion id must be 1..12");
    }
    result.id = id;
    result.name = criterion_name(id);
    result.seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(
            std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

std::vector<int> criteria_for_suite(const std::string& suite) {
    static const std::map<std::string, std::vector<int>> suites{
        {"kernels", {1, 2}},      {"covariance", {3}},  {"equilibrium", {4}},
        {"stationarity", {5}},    {"lowest", {6}},      {"gpath", {7}},
        {"saturation", {8}},      {"hurst", {9}},       {"fbm", {10}},
        {"poisson", {11}},        {"chi", {12}},
    };
    if (suite == "all") {
        std::vector<int> all;
        for (int i = 1; i <= kNumCriteria; ++i) all.push_back(i);
        return all;
    }
    const auto it = suites.find(suite);
    if (it == suites.end()) throw std::invalid_argument("unknown suite: " + suite);
    return it->second;
}

std::vector<std::string> suite_names() {
    return {"all",    "kernels", "covariance", "equilibrium", "stationarity", "lowest",
            "gpath",  "saturation", "hurst",   "fbm",         "poisson",      "chi"};
}

std::string format_result(const CriterionResult& r) {
    return fmt("criterion %02d [%s] %s: %s (%.1fs)", r.id, r.pass ? "PASS" : "FAIL",
               r.name.c_str(), r.detail.c_str(), r.seconds);
}

}  // namespace atlas::acceptance
