// Shared scalar special functions: regularized incomplete gamma/beta, the
// Kolmogorov tail, and the Student-t quantile used for batch-mean intervals.

#pragma once

namespace atlas::sf {

/// Regularized lower incomplete gamma P(a, x); P(a, 0) = 0, P(a, inf) = 1.
double reg_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double reg_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_beta_i(double x, double a, double b);

/// Kolmogorov distribution tail Q_KS(lambda) = 2 * sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda);

/// Two-sided Student-t critical value t such that P(|T_df| <= t) = confidence.
double student_t_critical(double confidence, double df);

}  // namespace atlas::sf
