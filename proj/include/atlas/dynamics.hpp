// Time integration of the finite-N truncation of the rank-based SDE: only the
// current minimum receives the drift gamma, every particle an independent
// N(0, dt) increment. Replicas are independent and may run on any number of
// worker threads; results are merged by replica id, so output is
// deterministic regardless of scheduling.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "atlas/model.hpp"
#include "atlas/rng.hpp"
#include "atlas/samplers.hpp"

namespace atlas {

/// Health diagnostics aggregated over replicas. argmin_top_fraction is the
/// fraction of steps whose minimum was a particle labeled in the top
/// k_buffer = max(1, N/10) initial ranks; any nonzero value means the
/// truncation may be binding and sets `warning`.
struct IntegratorReport {
    double argmin_top_fraction = 0.0;
    double max_position_drift = 0.0;
    std::int64_t steps = 0;
    bool warning = false;

    void merge(const IntegratorReport& other);
};

/// One Euler-Maruyama step: drift gamma*dt to the current minimum
/// (lexicographic tie-break on labels), then an independent N(0, dt) kick per
/// particle, re-ranked. Noise is indexed by particle label, so composing
/// euler_step reproduces simulate_paths frames exactly.
ParticleConfig euler_step(const ParticleConfig& config, const ModelParams& params,
                          const RngSpec& rng, std::int64_t step_index,
                          std::uint32_t replica = 0);

/// Simulates `replicas` independent paths from the given profile and records
/// frames at the nearest step-grid time <= each requested record time.
/// `workers` <= 0 selects hardware concurrency.
std::vector<SimPath> simulate_paths(const ProfileSpec& initial, const ModelParams& params,
                                    std::span<const double> record_times, std::int64_t replicas,
                                    const RngSpec& rng, IntegratorReport* report = nullptr,
                                    int workers = 0);

/// Memory-lean variant: runs each replica, hands the finished path to
/// `reduce`, and keeps only the reduced values (ordered by replica id).
std::vector<double> simulate_reduce(const ProfileSpec& initial, const ModelParams& params,
                                    std::span<const double> record_times, std::int64_t replicas,
                                    const RngSpec& rng,
                                    const std::function<double(const SimPath&)>& reduce,
                                    IntegratorReport* report = nullptr, int workers = 0);

/// Same, reducing each path to a vector (e.g. a trajectory statistic).
std::vector<std::vector<double>> simulate_reduce_vec(
    const ProfileSpec& initial, const ModelParams& params, std::span<const double> record_times,
    std::int64_t replicas, const RngSpec& rng,
    const std::function<std::vector<double>(const SimPath&)>& reduce,
    IntegratorReport* report = nullptr, int workers = 0);

}  // namespace atlas
