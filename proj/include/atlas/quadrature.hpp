// Adaptive Gauss-Kronrod quadrature, plus the log-substitution wrapper used
// for every mass identity in the kernel module: integrands on (0, inf) that
// are Gaussians (times polynomials) in log y become well-behaved on a finite
// window after w = log y.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace atlas {

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double estimate_, double achieved_error_)
        : std::runtime_error(what), estimate(estimate_), achieved_error(achieved_error_) {}
    double estimate;
    double achieved_error;
};

struct QuadOptions {
    double tol = 1e-10;    // absolute error target
    int max_depth = 60;    // bisection depth per panel
    int initial_panels = 32;
};

/// Adaptive G7/K15 integral of f over [lo, hi]. Throws QuadratureError (with
/// the achieved estimate attached) if the error target cannot be met.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadOptions& opts = {});

/// Integral of f over (0, inf) after substituting w = log y; the window
/// [e^-100, e^100] covers every integrand in this project with orders of
/// magnitude to spare.
double log_substituted_quadrature(const std::function<double(double)>& f, double tol = 1e-10);

}  // namespace atlas
