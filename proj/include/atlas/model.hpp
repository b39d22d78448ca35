// Core domain types for the rank-based particle system: model parameters,
// ranked configurations, recorded paths, and the centering/ranking transforms
// shared by the samplers, the integrator, and the estimators.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "atlas/rng.hpp"

namespace atlas {

/// Model and discretization parameters. `a` is the exponential density rate
/// of the inhomogeneous profile, `gamma` the drift given to the lowest
/// particle, `n_particles` the truncation of the infinite system.
struct ModelParams {
    double a = 1.0;
    double gamma = 0.0;
    std::int64_t n_particles = 1;
    double dt = 1e-3;
    double horizon = 1.0;

    /// Throws std::invalid_argument on any violated constraint.
    void validate() const;
};

/// Ranked particle positions at one time instant. `positions[i]` is the i-th
/// lowest position; `perm[i]` is the original label of the particle holding
/// rank i (ties broken by lower label).
struct ParticleConfig {
    double time = 0.0;
    std::vector<double> positions;
    std::vector<std::uint32_t> perm;
};

/// Positions of one replica recorded on a time grid. frames[k].time ==
/// times[k]; identical (seed, replica_id, params) reproduce identical frames
/// bit-for-bit.
struct SimPath {
    ModelParams params;
    std::vector<double> times;
    std::vector<ParticleConfig> frames;
    std::uint64_t seed = 0;
    std::int64_t replica_id = 0;
};

/// Ranks labeled positions with lexicographic tie-breaking: among equal
/// positions the lower original index comes first. Positions must be finite.
ParticleConfig rank_positions(std::span<const std::pair<std::uint32_t, double>> labeled,
                              double time = 0.0);

/// Convenience overload: labels are the element indices.
ParticleConfig rank_positions(std::span<const double> positions, double time = 0.0);

/// Shifts every position by +a*t/2, the translation under which the
/// inhomogeneous profiles are time-stationary.
ParticleConfig tilde_center(const ParticleConfig& config, double a);

/// tilde_center followed by the additional shift log(eps)/(2a), eps in (0,1).
ParticleConfig eps_center(const ParticleConfig& config, double a, double eps);

/// Maps ranked positions to the geometric view y_i = exp(a*(x_i + a*t/2)),
/// optionally scaled by sqrt(eps). Output is sorted ascending and strictly
/// positive. Entries whose exponent exceeds 700 raise std::range_error
/// naming the offending rank.
std::vector<double> y_view(const ParticleConfig& config, double a,
                           std::optional<double> eps = std::nullopt);

}  // namespace atlas
