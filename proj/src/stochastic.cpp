#include "dynmix/stochastic.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "dynmix/collision.hpp"
#include "dynmix/error.hpp"

namespace dynmix::stochastic {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

struct ChunkAccumulator {
    std::vector<CompensatedSum> value, value_sq, count;
    std::vector<std::array<CompensatedSum, 8>> state; // re/im of the 2x2 matrix

    ChunkAccumulator(std::size_t points, bool track)
        : value(points), value_sq(points), count(points), state(track ? points : 0) {}
};

void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) throw DomainError("time grid is empty");
    if (!(t_grid.front() >= 0.0)) throw DomainError("time grid must start at t >= 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    }
}

void run_chunk(const TrajectorySpec& spec, std::uint64_t chunk, ChunkAccumulator& acc) {
    const auto& params = spec.params;
    const double cos_theta = std::cos(params.theta());
    const std::uint64_t first = chunk * kChunkSize;
    const std::uint64_t last = std::min(spec.n_traj, first + kChunkSize);
    const std::size_t points = spec.t_grid.size();
    for (std::uint64_t traj = first; traj < last; ++traj) {
        CounterRng rng(spec.seed, traj);
        const auto counts = params.n().is_finite() ? sample_counts_finite(params, spec.t_grid, rng)
                                                   : sample_counts_inf(params, spec.t_grid, rng);
        for (std::size_t j = 0; j < points; ++j) {
            const double v = std::pow(cos_theta, static_cast<double>(counts[j]));
            acc.value[j].add(v);
            acc.value_sq[j].add(v * v);
            acc.count[j].add(static_cast<double>(counts[j]));
            if (spec.track_state) {
                const auto rho = collision::free_evolution(
                    collision::channel_pow(*spec.track_state, params.theta(), counts[j]), params.omega(),
                    spec.t_grid[j]);
                for (int e = 0; e < 4; ++e) {
                    acc.state[j][2 * e].add(rho.data()(e / 2, e % 2).real());
                    acc.state[j][2 * e + 1].add(rho.data()(e / 2, e % 2).imag());
                }
            }
        }
    }
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream + kGamma))) {}

CounterRng::result_type CounterRng::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential(double rate) { return -std::log(uniform()) / rate; }

std::vector<std::uint64_t> sample_counts_inf(const ModelParams& params, std::span<const double> t_grid,
                                             CounterRng& rng) {
    std::vector<std::uint64_t> counts(t_grid.size());
    if (t_grid.empty()) return counts;
    std::uint64_t n = 0;
    double next = rng.exponential(params.lambda());
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        while (next <= t_grid[j]) {
            ++n;
            next += rng.exponential(params.lambda());
        }
        counts[j] = n;
    }
    return counts;
}

std::vector<std::uint8_t> sample_flags_finite(const ModelParams& params, double t, CounterRng& rng) {
    const std::uint64_t n = params.n().value();
    const double rate = params.lambda() / static_cast<double>(n);
    std::vector<std::uint8_t> flags(n);
    for (auto& f : flags) f = rng.exponential(rate) <= t ? 1 : 0;
    return flags;
}

std::vector<std::uint64_t> sample_counts_finite(const ModelParams& params, std::span<const double> t_grid,
                                                CounterRng& rng) {
    const std::uint64_t n = params.n().value();
    const double rate = params.lambda() / static_cast<double>(n);
    std::vector<double> times(n);
    for (auto& t : times) t = rng.exponential(rate);
    std::sort(times.begin(), times.end());
    std::vector<std::uint64_t> counts(t_grid.size());
    std::uint64_t hit = 0;
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        while (hit < n && times[hit] <= t_grid[j]) ++hit;
        counts[j] = hit;
    }
    return counts;
}

TrajectoryBatchResult estimate_coherence(const TrajectorySpec& spec) {
    if (spec.n_traj == 0) throw DomainError("need at least one trajectory");
    check_grid(spec.t_grid);
    if (spec.track_state && spec.track_state->num_qubits() != 1) {
        throw DomainError("tracked state must be a single qubit");
    }

    const std::size_t points = spec.t_grid.size();
    const bool track = spec.track_state.has_value();
    const std::uint64_t chunks = (spec.n_traj + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkAccumulator> partial;
    partial.reserve(chunks);
    for (std::uint64_t c = 0; c < chunks; ++c) partial.emplace_back(points, track);

    unsigned workers = spec.workers != 0 ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(spec, c, partial[c]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    TrajectoryBatchResult result;
    result.t_grid = spec.t_grid;
    result.points.resize(points);
    const double n = static_cast<double>(spec.n_traj);
    for (std::size_t j = 0; j < points; ++j) {
        CompensatedSum s1, s2, sc;
        for (const auto& p : partial) {
            s1.add(p.value[j].value());
            s2.add(p.value_sq[j].value());
            sc.add(p.count[j].value());
        }
        const double mean = s1.value() / n;
        const double var = spec.n_traj > 1 ? std::max(0.0, (s2.value() - s1.value() * mean) / (n - 1.0)) : 0.0;
        auto& out = result.points[j];
        out.mean_coherence = mean * std::polar(1.0, -spec.params.omega() * spec.t_grid[j]);
        out.std_error = std::sqrt(var / n);
        out.mean_collision_count = sc.value() / n;
        out.n_traj = spec.n_traj;
    }

    if (track) {
        result.mean_states.reserve(points);
        for (std::size_t j = 0; j < points; ++j) {
            qcore::Matrix m(2, 2);
            for (int e = 0; e < 4; ++e) {
                CompensatedSum re, im;
                for (const auto& p : partial) {
                    re.add(p.state[j][2 * e].value());
                    im.add(p.state[j][2 * e + 1].value());
                }
                m(e / 2, e % 2) = qcore::Complex(re.value(), im.value()) / n;
            }
            result.mean_states.emplace_back(spec.track_state->labels(), (m + m.adjoint()) * 0.5);
        }
    }
    return result;
}

} // namespace dynmix::stochastic
