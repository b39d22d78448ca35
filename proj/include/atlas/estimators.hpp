// Centered/scaled fluctuation statistics computed from simulated paths: the
// occupation-count field, the ranked-particle field, the chi field triple,
// the recentered single-rank trajectory, and the Monte Carlo summaries
// (covariance with jackknife errors, structure-function exponent).

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "atlas/model.hpp"

namespace atlas {

/// Values of a fluctuation field on a (t, x) grid at one epsilon, replica-
/// major storage. Grids are validated against the truncation: bulk indices
/// must sit well below N (3 * i_eps(max x) <= N, and three times the expected
/// count below the top for the count field).
struct FieldGrid {
    double eps = 0.0;
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::size_t n_replicas = 0;
    std::vector<double> values;  // [replica][t][x]

    double at(std::size_t replica, std::size_t ti, std::size_t xi) const {
        return values[(replica * t_grid.size() + ti) * x_grid.size() + xi];
    }
    double& at(std::size_t replica, std::size_t ti, std::size_t xi) {
        return values[(replica * t_grid.size() + ti) * x_grid.size() + xi];
    }
};

/// floor(x / sqrt(eps)), the bulk rank addressed by grid coordinate x.
std::int64_t i_eps(double eps, double x);

/// Occupation-count field: eps^{1/4} (#{i : X^eps_i(t) <= x} - eps^{-1/2} e^{a x}).
FieldGrid count_field(const SimPath& path, double eps, std::span<const double> t_grid,
                      std::span<const double> x_grid);

/// Ranked-particle field: eps^{-1/4} (X^eps_{(i_eps(x))}(t) - log(x)/a).
FieldGrid ranked_field(const SimPath& path, double eps, std::span<const double> t_grid,
                       std::span<const double> x_grid);

/// The three geometric-view count/rank fields whose pairwise sup-differences
/// vanish as eps -> 0: chi (count at time t), chi_tilde (rank frozen at time
/// 0), chi_check (rank i_eps(x)).
struct ChiTriple {
    FieldGrid chi;
    FieldGrid chi_tilde;
    FieldGrid chi_check;
};
ChiTriple chi_triple(const SimPath& path, double eps, std::span<const double> t_grid,
                     std::span<const double> x_grid);

/// Recentered bulk-rank trajectory eps^{-1/4} (X^eps_{(i)}(t) - X^eps_{(i)}(0))
/// with i = i_eps(x); exactly 0 at t = 0.
std::vector<double> g_path_estimator(const SimPath& path, double eps, double x,
                                     std::span<const double> t_grid);

/// Terminal lowest-particle statistic X_(0)(T) + a T / 2 of the path's last
/// recorded frame.
double lowest_statistic(const SimPath& path, double a);

struct CovEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Unbiased sample covariance of paired replica samples with a leave-one-out
/// jackknife standard error. Requires at least 30 replicas.
CovEstimate empirical_cov(std::span<const double> xs, std::span<const double> ys);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
};

/// Least-squares slope of log mean-squared increment against log lag, over
/// lags inside [h_min, h_max] resolvable on the (uniform) time grid.
/// Increments are non-overlapping within each path.
SlopeFit structure_exponent(const std::vector<std::vector<double>>& paths,
                            std::span<const double> times, double h_min, double h_max);

}  // namespace atlas
