#include "atlas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "atlas/special_functions.hpp"

namespace atlas {

KSResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
    const std::size_t n = samples.size();
    if (n < 10) throw std::invalid_argument("ks_test: need at least 10 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw std::invalid_argument("ks_test: non-finite sample");
    std::sort(sorted.begin(), sorted.end());

    const double nd = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(sorted[i]);
        if (f < -1e-12 || f > 1.0 + 1e-12)
            throw std::invalid_argument("ks_test: cdf value outside [0,1]");
        d = std::max(d, (static_cast<double>(i) + 1.0) / nd - f);
        d = std::max(d, f - static_cast<double>(i) / nd);
    }
    KSResult result;
    result.statistic = d;
    result.n = n;
    result.p_value = sf::kolmogorov_tail(std::sqrt(nd) * d);
    return result;
}

double chi_square_poisson(std::span<const std::int64_t> counts, double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("chi_square_poisson: mean must be > 0");
    if (counts.empty()) throw std::invalid_argument("chi_square_poisson: no counts");
    const double n = static_cast<double>(counts.size());

    // Poisson pmf bins 0..kmax, with everything above kmax in a tail bin.
    const std::size_t kmax =
        static_cast<std::size_t>(std::ceil(mean + 10.0 * std::sqrt(mean) + 10.0));
    std::vector<double> expected(kmax + 2, 0.0);
    double pmf = std::exp(-mean);
    double cum = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        expected[k] = n * pmf;
        cum += pmf;
        pmf *= mean / static_cast<double>(k + 1);
    }
    expected[kmax + 1] = n * std::max(0.0, 1.0 - cum);

    std::vector<double> observed(kmax + 2, 0.0);
    for (std::int64_t c : counts) {
        if (c < 0) throw std::invalid_argument("chi_square_poisson: negative count");
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(c), kmax + 1);
        observed[k] += 1.0;
    }

    // Pool adjacent bins left-to-right until each pooled bin expects >= 5.
    std::vector<double> exp_pooled, obs_pooled;
    double e_acc = 0.0, o_acc = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        e_acc += expected[k];
        o_acc += observed[k];
        if (e_acc >= 5.0) {
            exp_pooled.push_back(e_acc);
            obs_pooled.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (!exp_pooled.empty()) {
            exp_pooled.back() += e_acc;
            obs_pooled.back() += o_acc;
        }
    }
    if (exp_pooled.size() < 2)
        throw std::invalid_argument("chi_square_poisson: pooling left fewer than two bins");

    double stat = 0.0;
    for (std::size_t k = 0; k < exp_pooled.size(); ++k) {
        const double diff = obs_pooled[k] - exp_pooled[k];
        stat += diff * diff / exp_pooled[k];
    }
    const double df = static_cast<double>(exp_pooled.size() - 1);
    return sf::reg_gamma_q(df / 2.0, stat / 2.0);
}

BatchMeanResult batch_mean_ci(std::span<const double> series, std::size_t batches) {
    if (batches < 2) throw std::invalid_argument("batch_mean_ci: need at least 2 batches");
    if (series.size() < 10 * batches)
        throw std::invalid_argument("batch_mean_ci: series shorter than 10 * batches");
    const std::size_t len = series.size() / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += series[b * len + i];
        means[b] = s / static_cast<double>(len);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(batches);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    const double bd = static_cast<double>(batches);
    const double se = std::sqrt(ss / (bd - 1.0) / bd);
    const double t = sf::student_t_critical(0.99, bd - 1.0);
    return BatchMeanResult{grand, t * se};
}

}  // namespace atlas
