#include "dynmix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynmix/error.hpp"
#include "dynmix/stochastic.hpp"

namespace dynmix::analysis {

PlateauReport detect_plateau(const analytic::MICurve& curve, double delta) {
    if (curve.points.size() < 10) throw DomainError("plateau detection needs at least 10 curve points");
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("plateau tolerance must lie in (0, 0.5)");
    if (!(curve.h_system >= 1e-9)) {
        throw UndefinedPlateauError("system entropy vanishes; I_f / H_S is undefined for a pure system");
    }

    PlateauReport report;
    report.delta = delta;
    std::size_t best_lo = 0, best_hi = 0;
    bool found = false;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const bool ok = std::abs(curve.points[i].i_f / curve.h_system - 1.0) <= delta;
        if (ok && !in_run) {
            run_start = i;
            in_run = true;
        }
        if (!ok) in_run = false;
        if (in_run) {
            const double span = curve.points[i].f - curve.points[run_start].f;
            if (!found || span > curve.points[best_hi].f - curve.points[best_lo].f) {
                best_lo = run_start;
                best_hi = i;
                found = true;
            }
        }
    }
    if (!found || best_hi == best_lo) return report;

    report.f_lo = curve.points[best_lo].f;
    report.f_hi = curve.points[best_hi].f;
    report.width = report.f_hi - report.f_lo;
    report.redundancy = report.f_lo > 0.0 ? static_cast<std::uint64_t>(std::floor(1.0 / report.f_lo)) : 0;
    return report;
}

double blp_measure(std::span<const double> t_grid, std::span<const double> distance, double lambda) {
    if (t_grid.size() != distance.size()) throw DomainError("time grid and distance samples differ in length");
    if (t_grid.size() < 2) throw ResolutionError("need at least two samples");
    if (!(lambda > 0.0)) throw DomainError("collision rate must be positive");
    const double max_step = 1.0 / (100.0 * lambda) * (1.0 + 1e-9);
    double flow = 0.0;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double dt = t_grid[i] - t_grid[i - 1];
        if (!(dt > 0.0)) throw DomainError("time grid must be strictly increasing");
        if (dt > max_step) throw ResolutionError("grid too coarse: fewer than 100 samples per unit 1/lambda");
        flow += std::max(0.0, distance[i] - distance[i - 1]);
    }
    return flow;
}

double dephasing_trace_distance(const ModelParams& params, double t) {
    // rho_+ - rho_- only has the off-diagonal entries c(t) and c(t)^*, whose
    // eigenvalues are +-|c(t)|
    return std::abs(analytic::coherence_factor(params, t));
}

std::vector<double> blp_grid(const ModelParams& params, double t_max, double per_unit_rate) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be positive");
    if (!(per_unit_rate >= 1.0)) throw DomainError("grid rate must be at least one point per unit 1/lambda");
    const double h = 1.0 / (per_unit_rate * params.lambda());
    const auto intervals = static_cast<std::size_t>(std::ceil(t_max / h));
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        grid[i] = t_max * static_cast<double>(i) / static_cast<double>(intervals);
    }
    if (params.n().is_finite() && std::cos(params.theta()) < 0.0) {
        const double tz = analytic::coherence_zero_time(params);
        if (tz > 0.0 && tz < t_max) {
            auto pos = std::lower_bound(grid.begin(), grid.end(), tz);
            if (*pos != tz) grid.insert(pos, tz);
        }
    }
    return grid;
}

double blp_of_model(const ModelParams& params, double t_max, double per_unit_rate) {
    const auto grid = blp_grid(params, t_max, per_unit_rate);
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) d[i] = dephasing_trace_distance(params, grid[i]);
    return blp_measure(grid, d, params.lambda());
}

InvarianceResult invariance_scan(double c_target, std::span<const std::pair<double, double>> pairs,
                                 std::span<const double> t_grid, Backend backend, const MonteCarloOptions& mc) {
    InvarianceResult result;
    std::size_t inside = 0;
    std::size_t total = 0;
    for (const auto& [lambda, theta] : pairs) {
        const ModelParams params(theta, lambda, 0.0, AncillaCount::infinite());
        if (std::abs(params.dephasing_rate() - c_target) > 1e-12) {
            throw DomainError("pair (lambda, theta) violates lambda (1 - cos theta) = C");
        }
        if (backend == Backend::Analytic) {
            for (double t : t_grid) {
                const double dev = std::abs(analytic::coherence_inf(params, t) - std::exp(-c_target * t));
                result.max_deviation = std::max(result.max_deviation, dev);
            }
            continue;
        }
        stochastic::TrajectorySpec spec{params, std::vector<double>(t_grid.begin(), t_grid.end()), mc.n_traj, mc.seed,
                                        mc.workers, std::nullopt};
        const auto batch = stochastic::estimate_coherence(spec);
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
            const auto& p = batch.points[j];
            const double dev = std::abs(p.mean_coherence - std::exp(-c_target * t_grid[j]));
            result.max_deviation = std::max(result.max_deviation, dev);
            double sigma = 0.0;
            if (p.std_error > 0.0) {
                sigma = dev / p.std_error;
            } else if (dev > 0.0) {
                sigma = std::numeric_limits<double>::infinity();
            }
            result.max_sigma = std::max(result.max_sigma, sigma);
            inside += sigma <= 3.0 ? 1 : 0;
            ++total;
        }
    }
    if (total > 0) result.within_3sigma = static_cast<double>(inside) / static_cast<double>(total);
    return result;
}

} // namespace dynmix::analysis
