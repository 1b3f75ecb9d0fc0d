#pragma once

// Monte-Carlo unraveling of the collision model.
//
// Every trajectory draws from its own counter-based stream keyed by
// (seed, trajectory index), and trajectories are aggregated in fixed-size
// chunks reduced in index order with compensated sums. The estimate is
// therefore bit-identical for a given seed whatever the worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynmix/params.hpp"
#include "dynmix/qcore.hpp"

namespace dynmix::stochastic {

// SplitMix64 run as a counter-based generator: the i-th draw of a stream is
// a bijective mix of key + i * golden-gamma, so streams can be created at
// any index without stepping through their predecessors.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    // Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();
    double exponential(double rate);

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Collision counts N(t) of one Poisson(lambda) trajectory at every grid time.
std::vector<std::uint64_t> sample_counts_inf(const ModelParams& params, std::span<const double> t_grid,
                                             CounterRng& rng);

// Collision flags of the n fresh ancillae at time t; each is set with
// probability 1 - e^{-lambda t / n}.
std::vector<std::uint8_t> sample_flags_finite(const ModelParams& params, double t, CounterRng& rng);

// Collision counts of one finite-reservoir trajectory along a grid: each
// ancilla gets a single exponential(lambda / n) collision time.
std::vector<std::uint64_t> sample_counts_finite(const ModelParams& params, std::span<const double> t_grid,
                                                CounterRng& rng);

struct TrajectorySpec {
    ModelParams params;
    std::vector<double> t_grid;
    std::uint64_t n_traj = 1;
    std::uint64_t seed = 0;
    // 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;
    // Debug cross-check: also average the full per-trajectory system state
    // U_t Phi^{N(t)}[rho0] U_t^dagger starting from this state.
    std::optional<qcore::DensityMatrix> track_state;
};

struct TimePointStats {
    qcore::Complex mean_coherence;
    double std_error = 0.0;
    double mean_collision_count = 0.0;
    std::uint64_t n_traj = 0;
};

struct TrajectoryBatchResult {
    std::vector<double> t_grid;
    std::vector<TimePointStats> points;
    // Filled only when TrajectorySpec::track_state is set.
    std::vector<qcore::DensityMatrix> mean_states;
};

inline constexpr std::uint64_t kChunkSize = 2048;

TrajectoryBatchResult estimate_coherence(const TrajectorySpec& spec);

} // namespace dynmix::stochastic
