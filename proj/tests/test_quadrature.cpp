#include <cmath>

#include "atlas/kernels.hpp"
#include "atlas/quadrature.hpp"
#include "doctest.h"

using namespace atlas;
namespace kn = atlas::kernels;

TEST_CASE("box function integrates to its width despite the discontinuity") {
    auto box = [](double y) { return y < 1.0 ? 1.0 : 0.0; };
    CHECK(log_substituted_quadrature(box, 1e-8) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("geometric kernel is a probability density in its first argument") {
    const double mass =
        log_substituted_quadrature([](double z) { return kn::hatq_kernel(1.0, 1.0, z, 1.0); });
    CHECK(std::abs(mass - 1.0) < 1e-9);
}

TEST_CASE("log-substituted quadrature matches a dense trapezoid oracle") {
    auto f = [](double y) {
        const double q = kn::hatq_kernel(1.0, 1.0, 1.0, y);
        return y * q * q;
    };
    // Trapezoid in w = log y over [-30, 30] with 1e6 nodes.
    const std::size_t n = 1000000;
    const double lo = -30.0, hi = 30.0;
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = lo + h * static_cast<double>(i);
        const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += weight * f(std::exp(w)) * std::exp(w);
    }
    const double oracle = acc * h;
    CHECK(log_substituted_quadrature(f) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("finite-interval integration reproduces the Gaussian mass") {
    QuadOptions opts;
    const double mass = integrate([](double z) { return kn::heat_kernel(1.0, z); }, -10.0, 10.0,
                                  opts);
    // 1 - 2 Phi(-10) to well below the tolerance.
    CHECK(std::abs(mass - 1.0) < 1e-10);
}

TEST_CASE("integrate validates its interval") {
    CHECK_THROWS_AS(integrate([](double) { return 0.0; }, 1.0, 0.0, QuadOptions{}),
                    std::invalid_argument);
}

TEST_CASE("quadrature error carries the achieved estimate") {
    // An integrable inverse-square-root singularity cannot reach 1e-12 at
    // refinement depth 3; the failure must surface as QuadratureError.
    QuadOptions opts;
    opts.tol = 1e-12;
    opts.max_depth = 3;
    opts.initial_panels = 1;
    const double c = 1.0 / M_PI;
    auto singular = [c](double x) { return 1.0 / std::sqrt(std::abs(x - c)); };
    try {
        (void)integrate(singular, 0.0, 1.0, opts);
    } catch (const QuadratureError& e) {
        CHECK(e.achieved_error > 0.0);
        CHECK(std::isfinite(e.estimate));
        return;
    }
    CHECK(false);  // the error path regressed
}
