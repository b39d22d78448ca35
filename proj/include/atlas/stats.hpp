// Goodness-of-fit and Monte Carlo inference utilities: one-sample
// Kolmogorov-Smirnov, Pearson chi-square against a Poisson law with tail-bin
// pooling, and batch-means confidence intervals for correlated series.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace atlas {

struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// One-sample KS test of `samples` against the CDF. Asymptotic p-value from
/// the Kolmogorov distribution. Requires n >= 10 and finite samples.
KSResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Pearson chi-square of integer counts against Poisson(mean), pooling bins
/// from the tail upward until every expected count is >= 5. Throws if fewer
/// than two bins survive pooling.
double chi_square_poisson(std::span<const std::int64_t> counts, double mean);

struct BatchMeanResult {
    double mean = 0.0;
    double halfwidth = 0.0;
};

/// Batch-means estimate with a 99% Student-t interval. Series length must be
/// at least 10 * batches.
BatchMeanResult batch_mean_ci(std::span<const double> series, std::size_t batches);

}  // namespace atlas
