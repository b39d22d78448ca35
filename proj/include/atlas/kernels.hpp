// Closed-form evaluation of the Gaussian heat kernel, the geometric
// Brownian motion transition kernels q_t and qhat_t, and the mollifier
// Psi^x with its derivatives. All functions are stateless and thread-safe.
//
// Conventions (theta = log(x)/a - log(y)/a - a*t/2):
//   q_t(x, y)    = p_t(log(x)/a - log(y)/a + a*t/2) / (a*x)
//   qhat_t(x, y) = p_t(theta) / (a*x)
//   Psi^x(t, y)  = Phi(theta / sqrt(t))    (integral of qhat over (0, x])
// qhat is a probability density in each argument separately; q integrates to
// one in its first argument and to exp(a^2 t) in its second.

#pragma once

namespace atlas::kernels {

/// Gaussian heat kernel p_t(z); underflows to exact 0 beyond 40 standard
/// deviations. Requires t > 0.
double heat_kernel(double t, double z);

/// Standard normal CDF via the complementary error function; symmetric
/// evaluation avoids cancellation in the far tails.
double normal_cdf(double z);

double q_kernel(double a, double t, double x, double y);
double hatq_kernel(double a, double t, double x, double y);

/// Psi^x(t, y), a value in [0, 1], nonincreasing in y; integrates to x in y.
double psi(double a, double x, double t, double y);

/// d/dy Psi^x(t, y) = -q_t(y, x).
double psi_dy(double a, double x, double t, double y);

/// d/dt Psi^x(t, y) = (-a/2 - theta/(2t)) p_t(theta).
double psi_dt(double a, double x, double t, double y);

}  // namespace atlas::kernels
