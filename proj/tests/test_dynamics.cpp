#include <algorithm>
#include <cmath>
#include <vector>

#include "atlas/dynamics.hpp"
#include "atlas/special_functions.hpp"
#include "atlas/stats.hpp"
#include "doctest.h"

using namespace atlas;

namespace {

ProfileSpec tilde_profile(double a, double gamma, std::int64_t n, double dt, double horizon) {
    ProfileSpec s;
    s.kind = ProfileKind::tilde_nu_a_gamma;
    s.params.a = a;
    s.params.gamma = gamma;
    s.params.n_particles = n;
    s.params.dt = dt;
    s.params.horizon = horizon;
    return s;
}

// Two-sample KS with the asymptotic p-value at the effective sample size.
double two_sample_ks_p(std::vector<double> xs, std::vector<double> ys) {
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j])
            ++i;
        else
            ++j;
        const double fx = static_cast<double>(i) / static_cast<double>(xs.size());
        const double fy = static_cast<double>(j) / static_cast<double>(ys.size());
        d = std::max(d, std::abs(fx - fy));
    }
    const double ne = static_cast<double>(xs.size()) * static_cast<double>(ys.size()) /
                      static_cast<double>(xs.size() + ys.size());
    return atlas::sf::kolmogorov_tail(std::sqrt(ne) * d);
}

}  // namespace

TEST_CASE("single particle is Brownian motion with drift gamma") {
    const double gamma = 1.0, t = 0.5;
    const ProfileSpec initial = tilde_profile(1.0, gamma, 1, 1e-3, t);
    const RngSpec rng{9001};
    const std::vector<double> record{0.0, t};
    auto reduce = [&](const SimPath& path) {
        return path.frames.back().positions[0] - path.frames.front().positions[0] - gamma * t;
    };
    const auto vals =
        simulate_reduce(initial, initial.params, record, 2000, rng, reduce, nullptr, 0);
    double sum = 0.0, sum2 = 0.0;
    for (double v : vals) {
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(vals.size());
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // Var over replicas should be t; SE of the variance is ~ t sqrt(2/n).
    CHECK(std::abs(var - t) < 3.0 * t * std::sqrt(2.0 / n));
    CHECK(std::abs(mean) < 3.0 * std::sqrt(t / n));
}

TEST_CASE("driftless particles have zero mean displacement") {
    const ProfileSpec initial = tilde_profile(1.0, 0.0, 3, 1e-2, 0.3);
    const RngSpec rng{1234};
    const std::vector<double> record{0.0, 0.3};
    auto reduce = [&](const SimPath& path) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            s += path.frames.back().positions[i] - path.frames.front().positions[i];
        return s / 3.0;
    };
    const auto vals =
        simulate_reduce(initial, initial.params, record, 3000, rng, reduce, nullptr, 0);
    double sum = 0.0;
    for (double v : vals) sum += v;
    const double mean = sum / static_cast<double>(vals.size());
    CHECK(std::abs(mean) < 3.0 * std::sqrt(0.3 / 3.0 / static_cast<double>(vals.size())));
}

TEST_CASE("simulate_paths is bitwise deterministic") {
    const ProfileSpec initial = tilde_profile(1.0, 0.5, 10, 1e-2, 0.2);
    const RngSpec rng{777};
    const std::vector<double> record{0.0, 0.1, 0.2};
    const auto first = simulate_paths(initial, initial.params, record, 3, rng, nullptr, 2);
    const auto second = simulate_paths(initial, initial.params, record, 3, rng, nullptr, 1);
    REQUIRE(first.size() == second.size());
    for (std::size_t r = 0; r < first.size(); ++r) {
        for (std::size_t k = 0; k < first[r].frames.size(); ++k) {
            CHECK(first[r].frames[k].positions == second[r].frames[k].positions);
            CHECK(first[r].frames[k].perm == second[r].frames[k].perm);
        }
    }
    CHECK(first[0].frames.back().positions != first[1].frames.back().positions);
}

TEST_CASE("composing euler_step reproduces simulate_paths frames") {
    const ProfileSpec initial = tilde_profile(1.0, 2.0, 5, 1e-2, 0.1);
    const RngSpec rng{31};
    std::vector<double> record(11);
    for (int k = 0; k <= 10; ++k) record[static_cast<std::size_t>(k)] = 0.01 * k;
    const auto paths = simulate_paths(initial, initial.params, record, 1, rng, nullptr, 1);
    const SimPath& path = paths[0];

    ParticleConfig config = sample_profile(initial, 5, rng, 0);
    for (int step = 1; step <= 10; ++step) {
        config = euler_step(config, initial.params, rng, step, 0);
        const auto& frame = path.frames[static_cast<std::size_t>(step)];
        REQUIRE(config.positions.size() == frame.positions.size());
        for (std::size_t i = 0; i < frame.positions.size(); ++i)
            CHECK(config.positions[i] == frame.positions[i]);
        CHECK(config.perm == frame.perm);
    }
}

TEST_CASE("frames are recorded at the nearest grid time below") {
    const ProfileSpec initial = tilde_profile(1.0, 0.0, 2, 0.1, 1.0);
    const RngSpec rng{4};
    const std::vector<double> record{0.25, 0.999};
    const auto paths = simulate_paths(initial, initial.params, record, 1, rng, nullptr, 1);
    CHECK(paths[0].times[0] == doctest::Approx(0.2));
    CHECK(paths[0].times[1] == doctest::Approx(0.9));
    CHECK(paths[0].frames[0].time == paths[0].times[0]);
}

TEST_CASE("simulate_paths validates input") {
    const ProfileSpec initial = tilde_profile(1.0, 0.0, 2, 0.1, 1.0);
    const RngSpec rng{4};
    const std::vector<double> record{0.5};
    CHECK_THROWS_AS(simulate_paths(initial, initial.params, record, 0, rng, nullptr, 1),
                    std::invalid_argument);
    const std::vector<double> beyond{1.5};
    CHECK_THROWS_AS(simulate_paths(initial, initial.params, beyond, 1, rng, nullptr, 1),
                    std::invalid_argument);
    const std::vector<double> unsorted{0.5, 0.25};
    CHECK_THROWS_AS(simulate_paths(initial, initial.params, unsorted, 1, rng, nullptr, 1),
                    std::invalid_argument);
}

TEST_CASE("bulk gap law is stationary under the dynamics") {
    // Started from the pinned-gap profile, bulk gap 10 keeps its Exp(2 gamma +
    // 10 a) law at T = 0.25.
    const double a = 1.0, gamma = 0.0;
    const ProfileSpec initial = tilde_profile(a, gamma, 300, 1e-3, 0.25);
    const RngSpec rng{5309};
    const std::vector<double> record{0.25};
    auto reduce = [](const SimPath& path) {
        const auto& f = path.frames.back();
        return f.positions[10] - f.positions[9];
    };
    const auto gaps =
        simulate_reduce(initial, initial.params, record, 500, rng, reduce, nullptr, 0);
    const double rate = 2.0 * gamma + 10.0 * a;
    const KSResult ks = ks_test(
        gaps, [rate](double g) { return g <= 0.0 ? 0.0 : -std::expm1(-rate * g); });
    CHECK(ks.p_value >= 0.005);
}

TEST_CASE("noise-stream relabeling leaves ranked marginals invariant") {
    // gamma = 0 with two different master seeds: the ranked marginal at T
    // must have the same law (two-sample KS).
    const ProfileSpec initial = tilde_profile(1.0, 0.0, 50, 1e-2, 0.2);
    const std::vector<double> record{0.2};
    auto reduce = [](const SimPath& path) { return path.frames.back().positions[10]; };
    const auto xs = simulate_reduce(initial, initial.params, record, 800, RngSpec{111}, reduce,
                                    nullptr, 0);
    const auto ys = simulate_reduce(initial, initial.params, record, 800, RngSpec{222}, reduce,
                                    nullptr, 0);
    CHECK(two_sample_ks_p(xs, ys) >= 0.005);
}

TEST_CASE("finite-N gap means are insensitive to halving dt") {
    // Short equilibrium runs at dt and dt/2 must give overlapping 99%
    // intervals for the lowest gap mean.
    auto gap_mean = [](double dt) {
        ProfileSpec initial = tilde_profile(1.0, 1.0, 5, dt, 300.0);
        const RngSpec rng{86};
        std::vector<double> record;
        for (int k = 0; k <= 2700; ++k) record.push_back(30.0 + 0.1 * k);
        auto reduce = [](const SimPath& path) {
            std::vector<double> gaps;
            gaps.reserve(path.frames.size());
            for (const auto& f : path.frames) gaps.push_back(f.positions[1] - f.positions[0]);
            return gaps;
        };
        const auto series = simulate_reduce_vec(initial, initial.params, record, 1, rng, reduce,
                                                nullptr, 1)[0];
        return batch_mean_ci(series, 15);
    };
    const BatchMeanResult coarse = gap_mean(2e-3);
    const BatchMeanResult fine = gap_mean(1e-3);
    CHECK(std::abs(coarse.mean - fine.mean) < coarse.halfwidth + fine.halfwidth);
}

TEST_CASE("healthy runs never see the minimum near the truncation") {
    ProfileSpec initial;
    initial.kind = ProfileKind::nu_a_gamma;
    initial.params.a = 1.0;
    initial.params.gamma = 0.5;
    initial.params.n_particles = 200;
    initial.params.dt = 1e-3;
    initial.params.horizon = 0.5;
    const std::vector<double> record{0.5};
    IntegratorReport report;
    simulate_paths(initial, initial.params, record, 5, RngSpec{12}, &report, 0);
    CHECK(report.argmin_top_fraction == 0.0);
    CHECK(!report.warning);
    CHECK(report.steps == 5 * 500);
}
