// Exact samplers for the stationary initial profiles of the particle system.
//
// All of them build configurations bottom-up (lowest particle first, then
// independent gaps), so an n-particle sample is exactly the n lowest points
// of the corresponding infinite configuration.

#pragma once

#include <cstdint>

#include "atlas/model.hpp"
#include "atlas/rng.hpp"

namespace atlas {

enum class ProfileKind {
    nu_a_gamma,        // exponential-density profile, lowest particle tilted
    tilde_nu_a_gamma,  // lowest particle pinned at 0, gaps Exp(2*gamma + i*a)
    homogeneous_mu0,   // rate-2*gamma Poisson profile on [0, inf); needs gamma > 0
    raw_poisson_mu_a,  // untilted exponential-density Poisson profile (= nu with gamma 0)
};

struct ProfileSpec {
    ProfileKind kind = ProfileKind::nu_a_gamma;
    ModelParams params;

    void validate() const;
};

/// One Gamma(shape, rate 1) variate via Marsaglia-Tsang squeeze/reject
/// (with the shape-boost transform below shape 1).
double sample_gamma_variate(double shape, RngStream& stream);

/// n lowest particles of the exponential-density stationary profile: the
/// geometric view has its minimum Gamma(1 + 2*gamma/a, 1)-distributed and
/// i.i.d. Exp(1) gaps; positions are log(y)/a.
ParticleConfig sample_nu(const ModelParams& params, std::int64_t n, const RngSpec& rng,
                         std::uint32_t replica = 0);

/// Lowest particle exactly at 0, independent gaps Exp(2*gamma + i*a).
ParticleConfig sample_tilde_nu(const ModelParams& params, std::int64_t n, const RngSpec& rng,
                               std::uint32_t replica = 0);

/// Rate-2*gamma Poisson profile on [0, inf); requires gamma > 0.
ParticleConfig sample_homogeneous(const ModelParams& params, std::int64_t n, const RngSpec& rng,
                                  std::uint32_t replica = 0);

/// Dispatch on ProfileSpec::kind.
ParticleConfig sample_profile(const ProfileSpec& spec, std::int64_t n, const RngSpec& rng,
                              std::uint32_t replica = 0);

}  // namespace atlas
