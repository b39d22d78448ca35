#include "atlas/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace atlas::kernels {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::domain_error(std::string("kernels: ") + name + " must be > 0");
}

double theta(double a, double x, double t, double y) {
    return std::log(x) / a - std::log(y) / a - a * t / 2.0;
}

}  // namespace

double heat_kernel(double t, double z) {
    require_positive(t, "t");
    const double u = z * z / (2.0 * t);
    if (u > 800.0) return 0.0;  // beyond 40 standard deviations
    return std::exp(-u) / std::sqrt(2.0 * M_PI * t);
}

double normal_cdf(double z) {
    if (z < 0.0) return 0.5 * std::erfc(-z * M_SQRT1_2);
    return 1.0 - 0.5 * std::erfc(z * M_SQRT1_2);
}

double q_kernel(double a, double t, double x, double y) {
    require_positive(a, "a");
    require_positive(t, "t");
    require_positive(x, "x");
    require_positive(y, "y");
    return heat_kernel(t, std::log(x) / a - std::log(y) / a + a * t / 2.0) / (a * x);
}

double hatq_kernel(double a, double t, double x, double y) {
    require_positive(a, "a");
    require_positive(t, "t");
    require_positive(x, "x");
    require_positive(y, "y");
    return heat_kernel(t, theta(a, x, t, y)) / (a * x);
}

double psi(double a, double x, double t, double y) {
    require_positive(a, "a");
    require_positive(t, "t");
    require_positive(x, "x");
    require_positive(y, "y");
    const double z = theta(a, x, t, y) / std::sqrt(t);
    if (z < -40.0) return 0.0;
    if (z > 40.0) return 1.0;
    return normal_cdf(z);
}

double psi_dy(double a, double x, double t, double y) {
    require_positive(a, "a");
    require_positive(t, "t");
    require_positive(x, "x");
    require_positive(y, "y");
    return -heat_kernel(t, theta(a, x, t, y)) / (a * y);
}

double psi_dt(double a, double x, double t, double y) {
    require_positive(a, "a");
    require_positive(t, "t");
    require_positive(x, "x");
    require_positive(y, "y");
    // d/dt of Phi(theta/sqrt t): the boundary term -a/2 plus the heat-equation
    // term (1/2) dp_t/dw at theta, which contributes -theta/(2t).
    const double th = theta(a, x, t, y);
    return (-a / 2.0 - th / (2.0 * t)) * heat_kernel(t, th);
}

}  // namespace atlas::kernels
