#include "atlas/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace atlas {

namespace {

std::int64_t step_of_time(double t, double dt) {
    // Nearest grid time <= t; times that are grid multiples up to rounding
    // snap to the intended step.
    const double raw = t / dt;
    const double nearest = std::round(raw);
    if (std::abs(raw - nearest) <= 1e-6 * std::max(1.0, std::abs(nearest)))
        return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::floor(raw));
}

struct RecordPlan {
    std::vector<std::int64_t> steps;  // strictly increasing
    std::int64_t last_step = 0;
};

RecordPlan plan_records(std::span<const double> record_times, const ModelParams& params) {
    if (record_times.empty())
        throw std::invalid_argument("simulate_paths: record_times must be non-empty");
    RecordPlan plan;
    double prev = -1.0;
    for (double t : record_times) {
        if (!(t >= 0.0) || t > params.horizon + 1e-12)
            throw std::invalid_argument("simulate_paths: record time outside [0, horizon]");
        if (t <= prev)
            throw std::invalid_argument("simulate_paths: record times must be strictly increasing");
        prev = t;
        const std::int64_t k = step_of_time(t, params.dt);
        if (!plan.steps.empty() && k <= plan.steps.back())
            throw std::invalid_argument(
                "simulate_paths: record times collide on the step grid; decrease dt");
        plan.steps.push_back(k);
    }
    plan.last_step = plan.steps.back();
    return plan;
}

struct ReplicaOutcome {
    SimPath path;
    IntegratorReport report;
};

ReplicaOutcome run_replica(const ProfileSpec& initial, const ModelParams& params,
                           const RecordPlan& plan, const RngSpec& rng, std::uint32_t replica) {
    const std::size_t n = static_cast<std::size_t>(params.n_particles);
    const ParticleConfig init = sample_profile(initial, params.n_particles, rng, replica);

    // Labeled state; labels coincide with initial ranks.
    std::vector<double> x = init.positions;
    const std::vector<double> x0 = x;
    std::vector<double> spare(n);  // cached second Box-Muller lane

    ReplicaOutcome out;
    out.path.params = params;
    out.path.seed = rng.master_seed;
    out.path.replica_id = replica;
    out.report.steps = plan.last_step;

    const double sqrt_dt = std::sqrt(params.dt);
    const double drift = params.gamma * params.dt;
    const std::int64_t top_label_cut =
        params.n_particles - std::max<std::int64_t>(1, params.n_particles / 10);
    std::int64_t top_hits = 0;

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] < x[argmin]) argmin = i;

    auto record = [&](std::int64_t step) {
        const double t = static_cast<double>(step) * params.dt;
        std::vector<std::pair<std::uint32_t, double>> labeled(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(x[i]))
                throw std::runtime_error("simulate_paths: non-finite position encountered");
            labeled[i] = {static_cast<std::uint32_t>(i), x[i]};
        }
        ParticleConfig frame = rank_positions(
            std::span<const std::pair<std::uint32_t, double>>(labeled), t);
        out.path.times.push_back(t);
        out.path.frames.push_back(std::move(frame));
        double drift_span = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            drift_span = std::max(drift_span, std::abs(x[i] - x0[i]));
        out.report.max_position_drift = std::max(out.report.max_position_drift, drift_span);
    };

    std::size_t next_record = 0;
    if (plan.steps[0] == 0) {
        record(0);
        ++next_record;
    }

    for (std::int64_t step = 1; step <= plan.last_step; ++step) {
        if (static_cast<std::int64_t>(argmin) >= top_label_cut) ++top_hits;
        x[argmin] += drift;
        const std::uint64_t draw = static_cast<std::uint64_t>(step - 1);
        std::size_t new_argmin = 0;
        if ((draw & 1) == 0) {
            const std::uint64_t block = draw >> 1;
            for (std::size_t i = 0; i < n; ++i) {
                const NormalPair p = normal_pair(rng, StreamKind::dynamics, replica,
                                                 static_cast<std::uint32_t>(i), block);
                x[i] += sqrt_dt * p.z0;
                spare[i] = p.z1;
                if (x[i] < x[new_argmin]) new_argmin = i;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += sqrt_dt * spare[i];
                if (x[i] < x[new_argmin]) new_argmin = i;
            }
        }
        argmin = new_argmin;
        if (next_record < plan.steps.size() && plan.steps[next_record] == step) {
            record(step);
            ++next_record;
        }
    }

    out.report.argmin_top_fraction =
        plan.last_step > 0 ? static_cast<double>(top_hits) / static_cast<double>(plan.last_step)
                           : 0.0;
    out.report.warning = out.report.argmin_top_fraction > 0.0;
    return out;
}

template <typename T>
std::vector<T> run_ensemble(const ProfileSpec& initial, const ModelParams& params,
                            std::span<const double> record_times, std::int64_t replicas,
                            const RngSpec& rng,
                            const std::function<T(const SimPath&)>& reduce,
                            IntegratorReport* report, int workers) {
    params.validate();
    initial.validate();
    if (replicas < 1) throw std::invalid_argument("simulate_paths: replica count must be >= 1");
    if (replicas > static_cast<std::int64_t>(kMaxReplicaId))
        throw std::invalid_argument("simulate_paths: too many replicas");
    const RecordPlan plan = plan_records(record_times, params);

    std::vector<T> results(static_cast<std::size_t>(replicas));
    IntegratorReport total;
    std::mutex report_mutex;
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;

    int nworkers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    if (nworkers < 1) nworkers = 1;
    nworkers = static_cast<int>(std::min<std::int64_t>(nworkers, replicas));

    auto work = [&]() {
        for (;;) {
            const std::int64_t r = next.fetch_add(1);
            if (r >= replicas || failed.load()) return;
            try {
                ReplicaOutcome outcome =
                    run_replica(initial, params, plan, rng, static_cast<std::uint32_t>(r));
                results[static_cast<std::size_t>(r)] = reduce(outcome.path);
                std::lock_guard<std::mutex> lock(report_mutex);
                total.merge(outcome.report);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(report_mutex);
                if (!failed.exchange(true)) error_message = e.what();
                return;
            }
        }
    };

    if (nworkers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error(error_message);
    if (report) *report = total;
    return results;
}

}  // namespace

void IntegratorReport::merge(const IntegratorReport& other) {
    const double hits =
        argmin_top_fraction * static_cast<double>(steps) +
        other.argmin_top_fraction * static_cast<double>(other.steps);
    steps += other.steps;
    argmin_top_fraction = steps > 0 ? hits / static_cast<double>(steps) : 0.0;
    max_position_drift = std::max(max_position_drift, other.max_position_drift);
    warning = warning || other.warning;
}

ParticleConfig euler_step(const ParticleConfig& config, const ModelParams& params,
                          const RngSpec& rng, std::int64_t step_index, std::uint32_t replica) {
    params.validate();
    if (step_index < 1) throw std::invalid_argument("euler_step: step_index must be >= 1");
    const std::size_t n = config.positions.size();
    if (n == 0) throw std::invalid_argument("euler_step: empty configuration");

    // Rank 0 holds the minimum; the drift goes to its label. Noise streams
    // are indexed by label, so composing euler_step matches simulate_paths.
    std::vector<std::pair<std::uint32_t, double>> labeled(n);
    for (std::size_t rank = 0; rank < n; ++rank)
        labeled[rank] = {config.perm[rank], config.positions[rank]};
    labeled[0].second += params.gamma * params.dt;

    const double sqrt_dt = std::sqrt(params.dt);
    const std::uint64_t draw = static_cast<std::uint64_t>(step_index - 1);
    for (auto& [label, pos] : labeled) {
        const double z = normal_at(rng, StreamKind::dynamics, replica, label, draw);
        if (!std::isfinite(z)) throw std::runtime_error("euler_step: non-finite increment");
        pos += sqrt_dt * z;
    }
    return rank_positions(std::span<const std::pair<std::uint32_t, double>>(labeled),
                          config.time + params.dt);
}

std::vector<SimPath> simulate_paths(const ProfileSpec& initial, const ModelParams& params,
                                    std::span<const double> record_times, std::int64_t replicas,
                                    const RngSpec& rng, IntegratorReport* report, int workers) {
    std::function<SimPath(const SimPath&)> identity = [](const SimPath& p) { return p; };
    return run_ensemble<SimPath>(initial, params, record_times, replicas, rng, identity, report,
                                 workers);
}

std::vector<double> simulate_reduce(const ProfileSpec& initial, const ModelParams& params,
                                    std::span<const double> record_times, std::int64_t replicas,
                                    const RngSpec& rng,
                                    const std::function<double(const SimPath&)>& reduce,
                                    IntegratorReport* report, int workers) {
    return run_ensemble<double>(initial, params, record_times, replicas, rng, reduce, report,
                                workers);
}

std::vector<std::vector<double>> simulate_reduce_vec(
    const ProfileSpec& initial, const ModelParams& params, std::span<const double> record_times,
    std::int64_t replicas, const RngSpec& rng,
    const std::function<std::vector<double>(const SimPath&)>& reduce, IntegratorReport* report,
    int workers) {
    return run_ensemble<std::vector<double>>(initial, params, record_times, replicas, rng, reduce,
                                             report, workers);
}

}  // namespace atlas
