// Evaluation and exact sampling of the limit objects: the Gaussian field
// u = W + M decomposed into its initial-noise and martingale parts, the
// ranked-particle limit process G^x, the fBM(1/4) interpolation, and the
// non-Gaussian lowest-particle limit law.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "atlas/rng.hpp"

namespace atlas {

/// Covariance evaluators for the limit field. Quadrature variants define the
/// general (cross-x) values; the closed forms are exact on the x == x'
/// diagonal and serve as certified references.
class LimitCovariance {
  public:
    explicit LimitCovariance(double a, double gamma = 0.0);

    double a() const { return a_; }
    double gamma() const { return gamma_; }

    /// E[W(t,x) W(t',x')] by quadrature of the Psi product; Psi at t = 0 is
    /// the indicator of (0, x]. At t = t' = 0 this is min(x, x').
    double cov_w(double t, double x, double tp, double xp) const;

    /// Closed form on the diagonal: 2x (1 - Phi((a/2) sqrt(t + t'))).
    double cov_w_closed(double t, double tp, double x) const;

    /// E[M(t,x) M(t',x')] = int_0^{t ^ t'} a^2 int y^2 q_{t-s}(y,x)
    /// q_{t'-s}(y,x') dy ds by double quadrature; 0 when t ^ t' = 0.
    double cov_m(double t, double x, double tp, double xp) const;

    /// Closed form on the diagonal: 2x (Phi((a/2) sqrt(t+t')) - Phi((a/2) sqrt|t-t'|)).
    double cov_m_closed(double t, double tp, double x) const;

    /// Variance of u(t, x) by quadrature; algebraically equals x for every t.
    double var_u(double t, double x) const;

    /// Full-field covariance cov_w + cov_m (B and W independent).
    double cov_u(double t, double x, double tp, double xp) const;

    /// Covariance of the ranked-particle limit process G^x (closed form):
    /// (2/(a^2 x)) (Phi((a/2)sqrt t) + Phi((a/2)sqrt t') - Phi((a/2)sqrt|t-t'|) - 1/2).
    double cov_g(double t, double tp, double x) const;

    /// Covariance of H^x_a = (2 pi)^{1/4} sqrt(a x / 2) G^x, which
    /// converges to the fBM(1/4) covariance as a -> 0.
    double cov_h(double t, double tp, double x) const;

  private:
    double a_;
    double gamma_;
};

/// fBM(1/4) covariance (s, t) -> (sqrt s + sqrt t - sqrt|t - s|) / 2.
double fbm_quarter_cov(double t, double tp);

/// Rescales G^x samples to the H^x_a normalization.
std::vector<double> h_transform(double x, double a, std::span<const double> g_values);

/// Dense symmetric PSD factorization with escalating diagonal jitter
/// (1e-14 .. 1e-10 of the mean diagonal). Returns the lower factor, row-major.
/// Throws std::runtime_error if the matrix stays indefinite.
std::vector<double> jittered_cholesky(std::vector<double> matrix, std::size_t n,
                                      double* jitter_used = nullptr);

/// Exact Gaussian sample of G^x on a strictly increasing time grid via
/// Cholesky of the cov_g matrix. Zero-variance grid points (t = 0) map to
/// exactly 0. One independent path per replica index.
std::vector<double> sample_limit_g(const LimitCovariance& cov, double x,
                                   std::span<const double> time_grid, const RngSpec& rng,
                                   std::uint32_t replica = 0);

/// Exact Gaussian samples of the space-time field u on a (t, x) grid, using
/// the quadrature covariance (including cross-x terms). The covariance is
/// assembled and factored once; one row per replica, entries time-major.
/// Intended for small grids.
std::vector<std::vector<double>> sample_limit_u(const LimitCovariance& cov,
                                                std::span<const double> t_grid,
                                                std::span<const double> x_grid,
                                                const RngSpec& rng, std::uint32_t n_replicas);

/// The limit law of the lowest particle: density proportional to
/// exp((2 gamma + a) x - exp(a x)), normalized; eta = log(Y)/a with
/// Y ~ Gamma(1 + 2 gamma/a, 1). The CDF of the difference eta2 - eta1 is the
/// convolution integral int f(v) F_eta(v + z) dv, evaluated by adaptive
/// quadrature; for gamma = 0 it is Logistic(0, 1/a).
class LowestLimit {
  public:
    LowestLimit(double gamma, double a);

    double a() const { return a_; }
    double gamma() const { return gamma_; }
    double shape() const { return shape_; }

    /// Normalization constant of the density, certified by quadrature.
    double normalization() const { return norm_; }

    double density(double x) const;
    double cdf_eta(double x) const;

    /// CDF of eta2 - eta1 (independent copies).
    double cdf_diff(double z) const;

    /// Mean and standard deviation of eta (by quadrature).
    double mean_eta() const { return mean_; }
    double sd_eta() const { return sd_; }

  private:
    double gamma_, a_, shape_, norm_, mean_, sd_;
    double support_lo_ = 0.0, support_hi_ = 0.0;
};

}  // namespace atlas
