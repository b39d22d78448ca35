#include "atlas/limit_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "atlas/kernels.hpp"
#include "atlas/quadrature.hpp"
#include "atlas/special_functions.hpp"

namespace atlas {

namespace kn = atlas::kernels;

LimitCovariance::LimitCovariance(double a, double gamma) : a_(a), gamma_(gamma) {
    if (!(a > 0.0)) throw std::invalid_argument("LimitCovariance: a must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("LimitCovariance: gamma must be >= 0");
}

double LimitCovariance::cov_w(double t, double x, double tp, double xp) const {
    if (!(t >= 0.0 && tp >= 0.0) || !(x > 0.0 && xp > 0.0))
        throw std::domain_error("cov_w: need t,t' >= 0 and x,x' > 0");
    if (t == 0.0 && tp == 0.0) return std::min(x, xp);
    if (t == 0.0) {
        // W(0,x) = B((0,x]): covariance is the Psi mass below x.
        QuadOptions opts;
        return integrate([&](double y) { return kn::psi(a_, xp, tp, y); }, 0.0, x, opts);
    }
    if (tp == 0.0) return cov_w(tp, xp, t, x);
    auto f = [&](double y) { return kn::psi(a_, x, t, y) * kn::psi(a_, xp, tp, y); };
    return log_substituted_quadrature(f, 1e-10);
}

double LimitCovariance::cov_w_closed(double t, double tp, double x) const {
    return 2.0 * x * (1.0 - kn::normal_cdf(a_ / 2.0 * std::sqrt(t + tp)));
}

double LimitCovariance::cov_m(double t, double x, double tp, double xp) const {
    if (!(t >= 0.0 && tp >= 0.0) || !(x > 0.0 && xp > 0.0))
        throw std::domain_error("cov_m: need t,t' >= 0 and x,x' > 0");
    const double tmin = std::min(t, tp);
    if (tmin == 0.0) return 0.0;
    const double a = a_;
    // Inner dy-integral in w = log y. The kernel factors become arbitrarily
    // narrow as s -> t ^ t', so the integration window is centered on the
    // peak of the combined Gaussian exponent (both factors plus the y^3
    // weight of y^2 dy) and scaled to its width; the integrand itself is
    // still evaluated through the kernels.
    auto inner = [&](double sig, double sigp) {
        const double p1 = 1.0 / (a * a * sig), p2 = 1.0 / (a * a * sigp);
        const double sigma_eff = 1.0 / std::sqrt(p1 + p2);
        // Center offsets from log x and log x' assembled without the large
        // cancellation of w - log x; otherwise the heat-kernel exponent loses
        // ~z dz / sigma digits as sig -> 0.
        const double lr = std::log(xp / x);
        const double d1 =
            (-a * a * sig / 2.0 * p1 + (lr - a * a * sigp / 2.0) * p2 + 3.0) / (p1 + p2);
        const double d2 = d1 - lr;
        const double log_x = std::log(x);
        QuadOptions opts;
        opts.tol = 1e-12;
        opts.initial_panels = 64;
        auto f = [&](double xi) {
            const double z1 = d1 / a + a * sig / 2.0 + sigma_eff / a * xi;
            const double z2 = d2 / a + a * sigp / 2.0 + sigma_eff / a * xi;
            const double y = std::exp(log_x + d1 + sigma_eff * xi);
            return y * kn::heat_kernel(sig, z1) * kn::heat_kernel(sigp, z2) * sigma_eff;
        };
        return integrate(f, -14.0, 14.0, opts);
    };
    // Substituting s = tmin - u^2 removes the inverse-square-root
    // singularity of the s-integrand at s -> t ^ t' when t == t'.
    auto outer = [&](double u) { return 2.0 * u * inner(t - tmin + u * u, tp - tmin + u * u); };
    QuadOptions opts;
    opts.tol = 1e-9;
    opts.initial_panels = 16;
    return integrate(outer, 0.0, std::sqrt(tmin), opts);
}

double LimitCovariance::cov_m_closed(double t, double tp, double x) const {
    return 2.0 * x *
           (kn::normal_cdf(a_ / 2.0 * std::sqrt(t + tp)) -
            kn::normal_cdf(a_ / 2.0 * std::sqrt(std::abs(tp - t))));
}

double LimitCovariance::var_u(double t, double x) const {
    return cov_w(t, x, t, x) + cov_m(t, x, t, x);
}

double LimitCovariance::cov_u(double t, double x, double tp, double xp) const {
    return cov_w(t, x, tp, xp) + cov_m(t, x, tp, xp);
}

double LimitCovariance::cov_g(double t, double tp, double x) const {
    if (!(t >= 0.0 && tp >= 0.0) || !(x > 0.0))
        throw std::domain_error("cov_g: need t,t' >= 0 and x > 0");
    const double c = a_ / 2.0;
    return 2.0 / (a_ * a_ * x) *
           (kn::normal_cdf(c * std::sqrt(t)) + kn::normal_cdf(c * std::sqrt(tp)) -
            kn::normal_cdf(c * std::sqrt(std::abs(tp - t))) - 0.5);
}

double LimitCovariance::cov_h(double t, double tp, double x) const {
    return std::sqrt(2.0 * M_PI) * (a_ * x) / 2.0 * cov_g(t, tp, x);
}

double fbm_quarter_cov(double t, double tp) {
    if (!(t >= 0.0 && tp >= 0.0)) throw std::domain_error("fbm_quarter_cov: need t,t' >= 0");
    return 0.5 * (std::sqrt(t) + std::sqrt(tp) - std::sqrt(std::abs(tp - t)));
}

std::vector<double> h_transform(double x, double a, std::span<const double> g_values) {
    const double scale = std::pow(2.0 * M_PI, 0.25) * std::sqrt(a * x) / std::sqrt(2.0);
    std::vector<double> out(g_values.begin(), g_values.end());
    for (double& v : out) v *= scale;
    return out;
}

std::vector<double> jittered_cholesky(std::vector<double> matrix, std::size_t n,
                                      double* jitter_used) {
    if (matrix.size() != n * n) throw std::invalid_argument("jittered_cholesky: size mismatch");
    double mean_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_diag += matrix[i * n + i];
    mean_diag = n > 0 ? mean_diag / static_cast<double>(n) : 0.0;

    for (double jitter = 1e-14; jitter <= 1.1e-10; jitter *= 10.0) {
        std::vector<double> chol = matrix;
        const double bump = jitter * mean_diag;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) chol[i * n + i] += bump;
        for (std::size_t j = 0; j < n && ok; ++j) {
            double d = chol[j * n + j];
            for (std::size_t k = 0; k < j; ++k) d -= chol[j * n + k] * chol[j * n + k];
            if (d <= 0.0) {
                ok = false;
                break;
            }
            const double root = std::sqrt(d);
            chol[j * n + j] = root;
            for (std::size_t i = j + 1; i < n; ++i) {
                double s = chol[i * n + j];
                for (std::size_t k = 0; k < j; ++k) s -= chol[i * n + k] * chol[j * n + k];
                chol[i * n + j] = s / root;
            }
        }
        if (ok) {
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < j; ++i) chol[i * n + j] = 0.0;
            if (jitter_used) *jitter_used = jitter;
            return chol;
        }
    }
    throw std::runtime_error("jittered_cholesky: matrix not positive definite after jitter");
}

namespace {

std::vector<double> sample_gaussian_vector(const std::vector<double>& chol, std::size_t n,
                                           const RngSpec& rng, std::uint32_t replica) {
    RngStream stream(rng, StreamKind::limit, replica, 0);
    std::vector<double> z(n);
    for (double& v : z) v = stream.next_normal();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += chol[i * n + j] * z[j];
        out[i] = s;
    }
    return out;
}

}  // namespace

std::vector<double> sample_limit_g(const LimitCovariance& cov, double x,
                                   std::span<const double> time_grid, const RngSpec& rng,
                                   std::uint32_t replica) {
    if (time_grid.empty()) throw std::invalid_argument("sample_limit_g: empty time grid");
    for (std::size_t i = 1; i < time_grid.size(); ++i)
        if (!(time_grid[i] > time_grid[i - 1]))
            throw std::invalid_argument("sample_limit_g: grid must be strictly increasing");

    // t = 0 has zero variance; sample the positive block and pin zeros.
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < time_grid.size(); ++i)
        if (time_grid[i] > 0.0) live.push_back(i);

    std::vector<double> out(time_grid.size(), 0.0);
    if (live.empty()) return out;

    const std::size_t m = live.size();
    std::vector<double> matrix(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            matrix[i * m + j] = cov.cov_g(time_grid[live[i]], time_grid[live[j]], x);
    const std::vector<double> chol = jittered_cholesky(std::move(matrix), m);
    const std::vector<double> values = sample_gaussian_vector(chol, m, rng, replica);
    for (std::size_t i = 0; i < m; ++i) out[live[i]] = values[i];
    return out;
}

std::vector<std::vector<double>> sample_limit_u(const LimitCovariance& cov,
                                                std::span<const double> t_grid,
                                                std::span<const double> x_grid,
                                                const RngSpec& rng, std::uint32_t n_replicas) {
    const std::size_t n = t_grid.size() * x_grid.size();
    if (n == 0) throw std::invalid_argument("sample_limit_u: empty grid");
    std::vector<double> matrix(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = t_grid[i / x_grid.size()];
        const double xi = x_grid[i % x_grid.size()];
        for (std::size_t j = i; j < n; ++j) {
            const double tj = t_grid[j / x_grid.size()];
            const double xj = x_grid[j % x_grid.size()];
            const double v = cov.cov_u(ti, xi, tj, xj);
            matrix[i * n + j] = v;
            matrix[j * n + i] = v;
        }
    }
    const std::vector<double> chol = jittered_cholesky(std::move(matrix), n);
    std::vector<std::vector<double>> out(n_replicas);
    for (std::uint32_t r = 0; r < n_replicas; ++r)
        out[r] = sample_gaussian_vector(chol, n, rng, r);
    return out;
}

LowestLimit::LowestLimit(double gamma, double a) : gamma_(gamma), a_(a) {
    if (!(a > 0.0)) throw std::invalid_argument("LowestLimit: a must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("LowestLimit: gamma must be >= 0");
    shape_ = 1.0 + 2.0 * gamma / a;
    // The printed density integrates to 1/a; the extra factor a makes it a
    // probability density, certified below by quadrature.
    norm_ = a_ / std::exp(std::lgamma(shape_));

    // Support where both CDF tails are below 1e-13: the left tail decays like
    // exp((2 gamma + a) x), the right doubly exponentially.
    support_lo_ = -(30.0 + std::abs(std::log(norm_))) / (2.0 * gamma_ + a_);
    double hi = 1.0 / a_;
    while (1.0 - cdf_eta(hi) > 1e-13) hi += 1.0 / a_;
    support_hi_ = hi;

    auto unnormalized = [this](double x) {
        return std::exp((2.0 * gamma_ + a_) * x - std::exp(a_ * x));
    };
    QuadOptions opts;
    opts.tol = 1e-12;
    const double mass = norm_ * integrate(unnormalized, support_lo_, support_hi_, opts);
    if (std::abs(mass - 1.0) > 1e-8)
        throw std::runtime_error("LowestLimit: density normalization failed quadrature check");

    mean_ = integrate([this](double x) { return x * density(x); }, support_lo_, support_hi_, opts);
    const double second = integrate([this](double x) { return x * x * density(x); }, support_lo_,
                                    support_hi_, opts);
    sd_ = std::sqrt(std::max(0.0, second - mean_ * mean_));
}

double LowestLimit::density(double x) const {
    const double e = (2.0 * gamma_ + a_) * x - std::exp(a_ * x);
    return e < -745.0 ? 0.0 : norm_ * std::exp(e);
}

double LowestLimit::cdf_eta(double x) const {
    // eta = log(Y)/a with Y ~ Gamma(shape, 1).
    return sf::reg_gamma_p(shape_, std::exp(a_ * x));
}

double LowestLimit::cdf_diff(double z) const {
    // P(eta2 - eta1 <= z) = E[F_eta(eta1 + z)].
    QuadOptions opts;
    opts.tol = 1e-11;
    opts.initial_panels = 16;
    return integrate([&](double v) { return density(v) * cdf_eta(v + z); }, support_lo_,
                     support_hi_, opts);
}

}  // namespace atlas
