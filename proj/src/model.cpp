#include "atlas/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace atlas {

void ModelParams::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be >= 0");
    if (n_particles < 1) throw std::invalid_argument("ModelParams: n_particles must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("ModelParams: dt must be > 0");
    if (!(horizon >= 0.0)) throw std::invalid_argument("ModelParams: horizon must be >= 0");
    if (horizon > 0.0 && dt > horizon)
        throw std::invalid_argument("ModelParams: dt must not exceed horizon");
}

ParticleConfig rank_positions(std::span<const std::pair<std::uint32_t, double>> labeled,
                              double time) {
    for (const auto& [label, pos] : labeled) {
        if (!std::isfinite(pos))
            throw std::invalid_argument("rank_positions: non-finite position for label " +
                                        std::to_string(label));
    }
    std::vector<std::uint32_t> order(labeled.size());
    std::iota(order.begin(), order.end(), 0u);
    // Exact bit-pattern equality decides ties, then the lower label wins.
    std::sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
        if (labeled[i].second != labeled[j].second) return labeled[i].second < labeled[j].second;
        return labeled[i].first < labeled[j].first;
    });
    ParticleConfig config;
    config.time = time;
    config.positions.reserve(labeled.size());
    config.perm.reserve(labeled.size());
    for (std::uint32_t idx : order) {
        config.positions.push_back(labeled[idx].second);
        config.perm.push_back(labeled[idx].first);
    }
    return config;
}

ParticleConfig rank_positions(std::span<const double> positions, double time) {
    std::vector<std::pair<std::uint32_t, double>> labeled(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        labeled[i] = {static_cast<std::uint32_t>(i), positions[i]};
    return rank_positions(std::span<const std::pair<std::uint32_t, double>>(labeled), time);
}

ParticleConfig tilde_center(const ParticleConfig& config, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("tilde_center: a must be > 0");
    ParticleConfig out = config;
    const double shift = a * config.time / 2.0;
    for (double& x : out.positions) x += shift;
    return out;
}

ParticleConfig eps_center(const ParticleConfig& config, double a, double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps_center: eps must lie in (0,1)");
    ParticleConfig out = tilde_center(config, a);
    const double shift = std::log(eps) / (2.0 * a);
    for (double& x : out.positions) x += shift;
    return out;
}

std::vector<double> y_view(const ParticleConfig& config, double a, std::optional<double> eps) {
    if (!(a > 0.0)) throw std::invalid_argument("y_view: a must be > 0");
    double scale = 1.0;
    if (eps) {
        if (!(*eps > 0.0 && *eps < 1.0))
            throw std::invalid_argument("y_view: eps must lie in (0,1)");
        scale = std::sqrt(*eps);
    }
    std::vector<double> out;
    out.reserve(config.positions.size());
    const double half_at = a * config.time / 2.0;
    for (std::size_t i = 0; i < config.positions.size(); ++i) {
        const double exponent = a * (config.positions[i] + half_at);
        if (exponent > 700.0)
            throw std::range_error("y_view: exponent overflow (saturation) at rank " +
                                   std::to_string(i));
        out.push_back(scale * std::exp(exponent));
    }
    return out;
}

}  // namespace atlas
