#include "atlas/samplers.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace atlas {

namespace {

// Gap streams use particle index i for gap i; the lowest particle's own draw
// uses particle index 0 of the same profile stream family.
ParticleConfig from_sorted(std::vector<double> positions) {
    ParticleConfig config;
    config.time = 0.0;
    config.perm.resize(positions.size());
    std::iota(config.perm.begin(), config.perm.end(), 0u);
    config.positions = std::move(positions);
    return config;
}

}  // namespace

void ProfileSpec::validate() const {
    params.validate();
    if (kind == ProfileKind::homogeneous_mu0 && !(params.gamma > 0.0))
        throw std::invalid_argument("ProfileSpec: homogeneous profile requires gamma > 0");
}

double sample_gamma_variate(double shape, RngStream& stream) {
    if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma_variate: shape must be > 0");
    if (shape < 1.0) {
        const double boosted = sample_gamma_variate(shape + 1.0, stream);
        return boosted * std::pow(stream.next_uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = stream.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.next_uniform();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

ParticleConfig sample_nu(const ModelParams& params, std::int64_t n, const RngSpec& rng,
                         std::uint32_t replica) {
    params.validate();
    if (n < 1) throw std::invalid_argument("sample_nu: n must be >= 1");
    RngStream lowest(rng, StreamKind::profile, replica, 0);
    const double shape = 1.0 + 2.0 * params.gamma / params.a;
    double y = sample_gamma_variate(shape, lowest);
    std::vector<double> positions(static_cast<std::size_t>(n));
    positions[0] = std::log(y) / params.a;
    for (std::int64_t i = 1; i < n; ++i) {
        RngStream gap(rng, StreamKind::profile, replica, static_cast<std::uint32_t>(i));
        y += gap.next_exponential(1.0);
        positions[static_cast<std::size_t>(i)] = std::log(y) / params.a;
    }
    return from_sorted(std::move(positions));
}

ParticleConfig sample_tilde_nu(const ModelParams& params, std::int64_t n, const RngSpec& rng,
                               std::uint32_t replica) {
    params.validate();
    if (n < 1) throw std::invalid_argument("sample_tilde_nu: n must be >= 1");
    std::vector<double> positions(static_cast<std::size_t>(n));
    positions[0] = 0.0;
    double x = 0.0;
    for (std::int64_t i = 1; i < n; ++i) {
        RngStream gap(rng, StreamKind::profile, replica, static_cast<std::uint32_t>(i));
        x += gap.next_exponential(2.0 * params.gamma + static_cast<double>(i) * params.a);
        positions[static_cast<std::size_t>(i)] = x;
    }
    return from_sorted(std::move(positions));
}

ParticleConfig sample_homogeneous(const ModelParams& params, std::int64_t n, const RngSpec& rng,
                                  std::uint32_t replica) {
    params.validate();
    if (!(params.gamma > 0.0))
        throw std::invalid_argument("sample_homogeneous: gamma must be > 0");
    if (n < 1) throw std::invalid_argument("sample_homogeneous: n must be >= 1");
    const double rate = 2.0 * params.gamma;
    std::vector<double> positions(static_cast<std::size_t>(n));
    double x = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        RngStream gap(rng, StreamKind::profile, replica, static_cast<std::uint32_t>(i));
        x += gap.next_exponential(rate);
        positions[static_cast<std::size_t>(i)] = x;
    }
    return from_sorted(std::move(positions));
}

ParticleConfig sample_profile(const ProfileSpec& spec, std::int64_t n, const RngSpec& rng,
                              std::uint32_t replica) {
    spec.validate();
    switch (spec.kind) {
        case ProfileKind::nu_a_gamma:
            return sample_nu(spec.params, n, rng, replica);
        case ProfileKind::tilde_nu_a_gamma:
            return sample_tilde_nu(spec.params, n, rng, replica);
        case ProfileKind::homogeneous_mu0:
            return sample_homogeneous(spec.params, n, rng, replica);
        case ProfileKind::raw_poisson_mu_a: {
            ModelParams untilted = spec.params;
            untilted.gamma = 0.0;
            return sample_nu(untilted, n, rng, replica);
        }
    }
    throw std::logic_error("sample_profile: unknown profile kind");
}

}  // namespace atlas
