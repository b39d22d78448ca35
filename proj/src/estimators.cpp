#include "atlas/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace atlas {

namespace {

const ParticleConfig& frame_at(const SimPath& path, double t) {
    for (std::size_t k = 0; k < path.times.size(); ++k)
        if (std::abs(path.times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
            return path.frames[k];
    throw std::invalid_argument("estimators: grid time " + std::to_string(t) +
                                " not recorded in path");
}

void check_grids(double eps, std::span<const double> t_grid, std::span<const double> x_grid) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("estimators: eps must lie in (0,1)");
    if (t_grid.empty() || x_grid.empty())
        throw std::invalid_argument("estimators: empty grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("estimators: t grid must be strictly increasing");
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (!(x_grid[i] > x_grid[i - 1]))
            throw std::invalid_argument("estimators: x grid must be strictly increasing");
}

FieldGrid make_grid(double eps, std::span<const double> t_grid, std::span<const double> x_grid) {
    FieldGrid grid;
    grid.eps = eps;
    grid.t_grid.assign(t_grid.begin(), t_grid.end());
    grid.x_grid.assign(x_grid.begin(), x_grid.end());
    grid.n_replicas = 1;
    grid.values.assign(t_grid.size() * x_grid.size(), 0.0);
    return grid;
}

// Count of particles with Y_i(t) <= threshold, i.e. ranked positions
// <= log(threshold)/a - a t / 2, by binary search on the ranked frame.
std::int64_t count_below_y(const ParticleConfig& frame, double a, double y_threshold) {
    const double cut = std::log(y_threshold) / a - a * frame.time / 2.0;
    const auto it =
        std::upper_bound(frame.positions.begin(), frame.positions.end(), cut);
    return static_cast<std::int64_t>(it - frame.positions.begin());
}

double y_of_rank(const ParticleConfig& frame, double a, std::int64_t rank) {
    const double exponent = a * (frame.positions[static_cast<std::size_t>(rank)] +
                                 a * frame.time / 2.0);
    if (exponent > 700.0)
        throw std::range_error("estimators: geometric view overflow at rank " +
                               std::to_string(rank));
    return std::exp(exponent);
}

}  // namespace

std::int64_t i_eps(double eps, double x) {
    return static_cast<std::int64_t>(std::floor(x / std::sqrt(eps)));
}

FieldGrid count_field(const SimPath& path, double eps, std::span<const double> t_grid,
                      std::span<const double> x_grid) {
    check_grids(eps, t_grid, x_grid);
    const double a = path.params.a;
    const double n = static_cast<double>(path.params.n_particles);
    const double inv_sqrt_eps = 1.0 / std::sqrt(eps);
    const double max_mean = inv_sqrt_eps * std::exp(a * x_grid.back());
    if (3.0 * max_mean > n)
        throw std::invalid_argument(
            "count_field: grid too wide for truncation (3 * expected count exceeds N)");

    FieldGrid grid = make_grid(eps, t_grid, x_grid);
    const double quarter = std::pow(eps, 0.25);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const ParticleConfig& frame = frame_at(path, t_grid[ti]);
        for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
            // X^eps_i(t) <= x  <=>  Y_i(t) <= eps^{-1/2} e^{a x}.
            const double mean = inv_sqrt_eps * std::exp(a * x_grid[xi]);
            const std::int64_t count = count_below_y(frame, a, mean);
            if (count >= path.params.n_particles)
                throw std::invalid_argument("count_field: count reached truncation N");
            grid.at(0, ti, xi) = quarter * (static_cast<double>(count) - mean);
        }
    }
    return grid;
}

FieldGrid ranked_field(const SimPath& path, double eps, std::span<const double> t_grid,
                       std::span<const double> x_grid) {
    check_grids(eps, t_grid, x_grid);
    const double a = path.params.a;
    const std::int64_t top_rank = i_eps(eps, x_grid.back());
    if (3 * top_rank > path.params.n_particles)
        throw std::invalid_argument(
            "ranked_field: grid too wide for truncation (3 * i_eps(max x) exceeds N)");

    FieldGrid grid = make_grid(eps, t_grid, x_grid);
    const double inv_quarter = std::pow(eps, -0.25);
    const double log_eps_shift = std::log(eps) / (2.0 * a);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const ParticleConfig& frame = frame_at(path, t_grid[ti]);
        const double half_at = a * frame.time / 2.0;
        for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
            const std::int64_t rank = i_eps(eps, x_grid[xi]);
            const double x_eps = frame.positions[static_cast<std::size_t>(rank)] + half_at +
                                 log_eps_shift;
            grid.at(0, ti, xi) = inv_quarter * (x_eps - std::log(x_grid[xi]) / a);
        }
    }
    return grid;
}

ChiTriple chi_triple(const SimPath& path, double eps, std::span<const double> t_grid,
                     std::span<const double> x_grid) {
    check_grids(eps, t_grid, x_grid);
    const double a = path.params.a;
    const double inv_sqrt_eps = 1.0 / std::sqrt(eps);
    const std::int64_t top_rank = i_eps(eps, x_grid.back());
    if (3 * top_rank > path.params.n_particles)
        throw std::invalid_argument("chi_triple: grid too wide for truncation");

    ChiTriple out{make_grid(eps, t_grid, x_grid), make_grid(eps, t_grid, x_grid),
                  make_grid(eps, t_grid, x_grid)};
    const double quarter = std::pow(eps, 0.25);
    const ParticleConfig& frame0 = frame_at(path, 0.0);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const ParticleConfig& frame = frame_at(path, t_grid[ti]);
        for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
            const double x = x_grid[xi];
            const double threshold = inv_sqrt_eps * x;
            const std::int64_t count_t = count_below_y(frame, a, threshold);
            const std::int64_t count_0 = count_below_y(frame0, a, threshold);
            if (count_t >= path.params.n_particles || count_0 >= path.params.n_particles)
                throw std::invalid_argument("chi_triple: count reached truncation N");
            const std::int64_t rank = i_eps(eps, x);
            out.chi.at(0, ti, xi) = quarter * (static_cast<double>(count_t) - threshold);
            out.chi_tilde.at(0, ti, xi) =
                quarter * (static_cast<double>(count_0) - y_of_rank(frame, a, count_0));
            out.chi_check.at(0, ti, xi) =
                quarter * (static_cast<double>(rank) - y_of_rank(frame, a, rank));
        }
    }
    return out;
}

std::vector<double> g_path_estimator(const SimPath& path, double eps, double x,
                                     std::span<const double> t_grid) {
    if (!(x > 0.0)) throw std::invalid_argument("g_path_estimator: x must be > 0");
    check_grids(eps, t_grid, std::span<const double>(&x, 1));
    const std::int64_t rank = i_eps(eps, x);
    if (3 * rank > path.params.n_particles)
        throw std::invalid_argument("g_path_estimator: rank too close to truncation");
    const double a = path.params.a;
    const ParticleConfig& frame0 = frame_at(path, 0.0);
    const double base = frame0.positions[static_cast<std::size_t>(rank)];
    const double inv_quarter = std::pow(eps, -0.25);
    std::vector<double> out(t_grid.size());
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const ParticleConfig& frame = frame_at(path, t_grid[ti]);
        // The log(eps) centering cancels in the difference; the a t / 2
        // translation survives.
        const double x_eps = frame.positions[static_cast<std::size_t>(rank)] +
                             a * frame.time / 2.0;
        out[ti] = inv_quarter * (x_eps - base);
    }
    return out;
}

double lowest_statistic(const SimPath& path, double a) {
    if (path.frames.empty()) throw std::invalid_argument("lowest_statistic: empty path");
    const ParticleConfig& last = path.frames.back();
    return last.positions.front() + a * last.time / 2.0;
}

CovEstimate empirical_cov(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw std::invalid_argument("empirical_cov: length mismatch");
    if (n < 30) throw std::invalid_argument("empirical_cov: need at least 30 replicas");
    double sx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxy += xs[i] * ys[i];
    }
    const double nd = static_cast<double>(n);
    const double cov = (sxy - sx * sy / nd) / (nd - 1.0);

    // Leave-one-out jackknife.
    double mean_loo = 0.0;
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sx_i = sx - xs[i];
        const double sy_i = sy - ys[i];
        const double sxy_i = sxy - xs[i] * ys[i];
        loo[i] = (sxy_i - sx_i * sy_i / (nd - 1.0)) / (nd - 2.0);
        mean_loo += loo[i];
    }
    mean_loo /= nd;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (loo[i] - mean_loo) * (loo[i] - mean_loo);
    const double se = std::sqrt((nd - 1.0) / nd * ss);
    return CovEstimate{cov, se};
}

SlopeFit structure_exponent(const std::vector<std::vector<double>>& paths,
                            std::span<const double> times, double h_min, double h_max) {
    if (paths.empty() || times.size() < 3)
        throw std::invalid_argument("structure_exponent: degenerate input");
    if (!(h_min > 0.0 && h_max > h_min))
        throw std::invalid_argument("structure_exponent: bad lag range");
    const double step = times[1] - times[0];
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - step) > 1e-9 * std::max(1.0, step))
            throw std::invalid_argument("structure_exponent: time grid must be uniform");

    // Log-spaced lags restricted to grid multiples.
    std::vector<std::size_t> lags;
    for (double target = h_min; target <= h_max * (1.0 + 1e-12); target *= 2.0) {
        const std::size_t k = static_cast<std::size_t>(std::llround(target / step));
        if (k < 1 || k >= times.size()) continue;
        const double h = static_cast<double>(k) * step;
        if (h < h_min * (1.0 - 1e-12) || h > h_max * (1.0 + 1e-12)) continue;
        if (lags.empty() || lags.back() != k) lags.push_back(k);
    }
    if (lags.size() < 3)
        throw std::invalid_argument("structure_exponent: grid does not resolve the lag range");

    std::vector<double> log_h, log_msq;
    for (std::size_t k : lags) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& p : paths) {
            if (p.size() != times.size())
                throw std::invalid_argument("structure_exponent: path length mismatch");
            for (std::size_t i = 0; i + k < p.size(); i += k) {  // non-overlapping
                const double d = p[i + k] - p[i];
                sum += d * d;
                ++count;
            }
        }
        if (count == 0) continue;
        log_h.push_back(std::log(static_cast<double>(k) * step));
        log_msq.push_back(std::log(sum / static_cast<double>(count)));
    }
    const std::size_t m = log_h.size();
    if (m < 3) throw std::invalid_argument("structure_exponent: too few usable lags");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += log_h[i];
        my += log_msq[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (log_h[i] - mx) * (log_h[i] - mx);
        sxy += (log_h[i] - mx) * (log_msq[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = log_msq[i] - intercept - slope * log_h[i];
        rss += r * r;
    }
    const double se =
        m > 2 ? std::sqrt(rss / (static_cast<double>(m) - 2.0) / sxx) : 0.0;
    return SlopeFit{slope, intercept, se};
}

}  // namespace atlas
