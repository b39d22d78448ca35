#include <cmath>
#include <vector>

#include "atlas/kernels.hpp"
#include "atlas/rng.hpp"
#include "atlas/special_functions.hpp"
#include "atlas/stats.hpp"
#include "doctest.h"

using namespace atlas;

namespace {

std::int64_t poisson_draw(RngStream& stream, double mean) {
    // Knuth: multiply uniforms until below e^{-mean}.
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = 1.0;
    do {
        p *= stream.next_uniform();
        ++k;
    } while (p > limit);
    return k - 1;
}

}  // namespace

TEST_CASE("ks test accepts the null and rejects a location shift") {
    const RngSpec rng{100};
    std::vector<double> uniform(2000);
    for (std::size_t i = 0; i < uniform.size(); ++i)
        uniform[i] = uniform_at(rng, StreamKind::aux, 31, 0, i);
    const KSResult null_result = ks_test(uniform, [](double u) {
        return std::min(1.0, std::max(0.0, u));
    });
    CHECK(null_result.p_value >= 0.01);

    std::vector<double> gauss(2000);
    for (std::size_t i = 0; i < gauss.size(); ++i)
        gauss[i] = normal_at(rng, StreamKind::aux, 32, 0, i);
    const KSResult shifted = ks_test(gauss, [](double z) { return kernels::normal_cdf(z - 1.0); });
    CHECK(shifted.p_value < 1e-6);
    CHECK(shifted.statistic == doctest::Approx(0.383).epsilon(0.1));
}

TEST_CASE("ks statistic of a single-ish sample set") {
    std::vector<double> tiny(10, 0.5);  // all mass at 0.5 vs U(0,1)
    const KSResult r = ks_test(tiny, [](double u) { return std::min(1.0, std::max(0.0, u)); });
    CHECK(r.statistic == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<double> nine(9, 0.5);
    CHECK_THROWS_AS(ks_test(nine, [](double) { return 0.5; }), std::invalid_argument);
}

TEST_CASE("ks p-values are roughly uniform under the null") {
    const RngSpec rng{2042};
    int below_5pct = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> sample(100);
        for (std::size_t i = 0; i < sample.size(); ++i)
            sample[i] =
                uniform_at(rng, StreamKind::aux, static_cast<std::uint32_t>(rep), 33, i);
        const KSResult r = ks_test(sample, [](double u) {
            return std::min(1.0, std::max(0.0, u));
        });
        if (r.p_value < 0.05) ++below_5pct;
    }
    const double fraction = static_cast<double>(below_5pct) / reps;
    CHECK(fraction >= 0.01);
    CHECK(fraction <= 0.12);
}

TEST_CASE("chi-square accepts Poisson counts and rejects degenerate ones") {
    const RngSpec rng{3003};
    std::vector<std::int64_t> counts(10000);
    RngStream stream(rng, StreamKind::aux, 41, 0);
    for (auto& c : counts) c = poisson_draw(stream, 5.0);
    CHECK(chi_square_poisson(counts, 5.0) >= 0.01);

    std::vector<std::int64_t> zeros(100, 0);
    CHECK(chi_square_poisson(zeros, 5.0) < 1e-10);

    std::vector<std::int64_t> few(30, 0);
    CHECK_THROWS_AS(chi_square_poisson(few, 0.1), std::invalid_argument);
}

TEST_CASE("batch means: constants, coverage, correlation widening") {
    std::vector<double> constant(500, 3.0);
    const BatchMeanResult c = batch_mean_ci(constant, 20);
    CHECK(c.mean == 3.0);
    CHECK(c.halfwidth == 0.0);

    const RngSpec rng{55};
    const double mu = 0.7;
    int covered = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> series(10000);
        for (std::size_t i = 0; i < series.size(); ++i)
            series[i] =
                mu + normal_at(rng, StreamKind::aux, static_cast<std::uint32_t>(trial), 51, i);
        const BatchMeanResult bm = batch_mean_ci(series, 20);
        if (std::abs(bm.mean - mu) <= bm.halfwidth) ++covered;
    }
    CHECK(covered >= 95);

    // AR(1) with rho = 0.99 must widen the interval relative to iid noise.
    std::vector<double> ar(20000, 0.0), iid(20000, 0.0);
    for (std::size_t i = 1; i < ar.size(); ++i) {
        const double z = normal_at(rng, StreamKind::aux, 7, 52, i);
        ar[i] = 0.99 * ar[i - 1] + z;
        iid[i] = z;
    }
    CHECK(batch_mean_ci(ar, 20).halfwidth > batch_mean_ci(iid, 20).halfwidth);

    std::vector<double> too_short(100, 1.0);
    CHECK_THROWS_AS(batch_mean_ci(too_short, 20), std::invalid_argument);
}

TEST_CASE("special functions hit reference values") {
    CHECK(sf::reg_gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(sf::reg_gamma_p(2.0, 2.0) ==
          doctest::Approx(1.0 - std::exp(-2.0) * 3.0).epsilon(1e-13));
    CHECK(sf::reg_gamma_q(0.5, 4.0) ==
          doctest::Approx(std::erfc(2.0)).epsilon(1e-12));  // Q(1/2, x) = erfc(sqrt x)
    CHECK(sf::reg_beta_i(0.5, 2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(sf::reg_beta_i(0.25, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-13));
    // Student-t two-sided critical values (standard tables).
    CHECK(sf::student_t_critical(0.99, 19.0) == doctest::Approx(2.861).epsilon(1e-3));
    CHECK(sf::student_t_critical(0.95, 10.0) == doctest::Approx(2.228).epsilon(1e-3));
    // Kolmogorov tail at its median-ish point.
    CHECK(sf::kolmogorov_tail(1.0) == doctest::Approx(0.27).epsilon(0.01));
    CHECK(sf::kolmogorov_tail(0.05) == doctest::Approx(1.0));
}
