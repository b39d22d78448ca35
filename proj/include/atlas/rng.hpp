// Counter-based random number generation for reproducible Monte Carlo.
//
// Every random draw in the project is a pure function of
// (master_seed, stream kind, replica, particle, draw index), so replicas can
// run on any number of threads, in any order, and still produce bit-identical
// results. The block cipher is Philox4x32-10 (Salmon et al., SC'11), the de
// facto standard for parallel simulation streams.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace atlas {

/// Seed container. The derivation rule below turns one 64-bit master seed
/// into unbounded independent streams, one per (kind, replica, particle).
struct RngSpec {
    std::uint64_t master_seed = 0;
};

/// Disjoint stream families. A (kind, replica, particle) triple must be
/// consumed by exactly one sampler type so draw indices never collide.
enum class StreamKind : std::uint32_t {
    dynamics = 0,  // Euler increments, indexed by (particle, step)
    profile  = 1,  // initial-condition sampling
    limit    = 2,  // exact Gaussian sampling of limit processes
    aux      = 3,  // test fixtures and miscellaneous draws
};

namespace detail {

struct PhiloxBlock {
    std::uint32_t v[4];
};

inline PhiloxBlock philox_round(PhiloxBlock c, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c.v[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c.v[2];
    return PhiloxBlock{{static_cast<std::uint32_t>(p1 >> 32) ^ c.v[1] ^ k0,
                        static_cast<std::uint32_t>(p1),
                        static_cast<std::uint32_t>(p0 >> 32) ^ c.v[3] ^ k1,
                        static_cast<std::uint32_t>(p0)}};
}

/// Philox4x32, 10 rounds, Random123-compatible.
inline PhiloxBlock philox4x32(PhiloxBlock ctr, std::uint32_t k0, std::uint32_t k1) {
    for (int r = 0; r < 9; ++r) {
        ctr = philox_round(ctr, k0, k1);
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    return philox_round(ctr, k0, k1);
}

// 53-bit uniform mapped strictly inside (0,1); never returns 0 or 1, so
// log() and log(1-u) are always finite.
inline double u64_to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

inline constexpr std::uint32_t kMaxReplicaId = (1u << 28) - 1;

/// One 128-bit Philox block of the stream. `block_index` advances the
/// counter; everything else selects the stream.
inline detail::PhiloxBlock rng_block(const RngSpec& spec, StreamKind kind,
                                     std::uint32_t replica, std::uint32_t particle,
                                     std::uint64_t block_index) {
    detail::PhiloxBlock ctr{{static_cast<std::uint32_t>(block_index),
                             static_cast<std::uint32_t>(block_index >> 32),
                             particle,
                             (static_cast<std::uint32_t>(kind) << 28) | replica}};
    return detail::philox4x32(ctr, static_cast<std::uint32_t>(spec.master_seed),
                              static_cast<std::uint32_t>(spec.master_seed >> 32));
}

struct NormalPair {
    double z0, z1;
};

/// Two independent N(0,1) variates from one block (Box-Muller).
inline NormalPair normal_pair(const RngSpec& spec, StreamKind kind, std::uint32_t replica,
                              std::uint32_t particle, std::uint64_t block_index) {
    const auto b = rng_block(spec, kind, replica, particle, block_index);
    const std::uint64_t w0 = (std::uint64_t{b.v[0]} << 32) | b.v[1];
    const std::uint64_t w1 = (std::uint64_t{b.v[2]} << 32) | b.v[3];
    const double r = std::sqrt(-2.0 * std::log(detail::u64_to_unit(w0)));
    const double theta = 2.0 * M_PI * detail::u64_to_unit(w1);
    return NormalPair{r * std::cos(theta), r * std::sin(theta)};
}

/// N(0,1) variate number `draw_index` of a stream. Consecutive indices share
/// a block pairwise; hot loops that sweep indices in order should cache the
/// spare lane (see dynamics.cpp) instead of calling this twice.
inline double normal_at(const RngSpec& spec, StreamKind kind, std::uint32_t replica,
                        std::uint32_t particle, std::uint64_t draw_index) {
    const NormalPair p = normal_pair(spec, kind, replica, particle, draw_index >> 1);
    return (draw_index & 1) ? p.z1 : p.z0;
}

/// Uniform(0,1) variate number `draw_index` of a stream.
inline double uniform_at(const RngSpec& spec, StreamKind kind, std::uint32_t replica,
                         std::uint32_t particle, std::uint64_t draw_index) {
    const auto b = rng_block(spec, kind, replica, particle, draw_index >> 1);
    const std::uint64_t w = (draw_index & 1) ? ((std::uint64_t{b.v[2]} << 32) | b.v[3])
                                             : ((std::uint64_t{b.v[0]} << 32) | b.v[1]);
    return detail::u64_to_unit(w);
}

/// Sequential cursor over one stream, for samplers with data-dependent
/// consumption (rejection loops). next_normal() burns a whole block so the
/// uniform and normal draw positions can never overlap.
class RngStream {
  public:
    RngStream(const RngSpec& spec, StreamKind kind, std::uint32_t replica,
              std::uint32_t particle)
        : spec_(spec), kind_(kind), replica_(replica), particle_(particle) {
        if (replica > kMaxReplicaId) throw std::invalid_argument("replica id exceeds 2^28-1");
    }

    double next_uniform() { return uniform_at(spec_, kind_, replica_, particle_, cursor_++); }

    double next_normal() {
        cursor_ += cursor_ & 1;  // align to a fresh block
        const NormalPair p = normal_pair(spec_, kind_, replica_, particle_, cursor_ >> 1);
        cursor_ += 2;
        return p.z0;
    }

    /// Exponential with the given rate.
    double next_exponential(double rate) { return -std::log(next_uniform()) / rate; }

  private:
    RngSpec spec_;
    StreamKind kind_;
    std::uint32_t replica_, particle_;
    std::uint64_t cursor_ = 0;
};

}  // namespace atlas
