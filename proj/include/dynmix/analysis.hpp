#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dynmix/analytic.hpp"
#include "dynmix/params.hpp"

namespace dynmix::analysis {

struct PlateauReport {
    double delta = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    double width = 0.0;
    // floor(1 / f_lo): number of disjoint fragments that each hold the
    // plateau value of information.
    std::uint64_t redundancy = 0;
};

inline constexpr double kDefaultPlateauDelta = 0.05;

// Largest contiguous run of curve points with |I_f / H_S - 1| <= delta.
PlateauReport detect_plateau(const analytic::MICurve& curve, double delta = kDefaultPlateauDelta);

// Information back-flow: sum over grid segments of the positive increments
// of the trace distance between the evolved |+> and |-> states. Requires at
// least 100 samples per unit 1/lambda.
double blp_measure(std::span<const double> t_grid, std::span<const double> distance, double lambda);

// Trace distance between the dephased |+> and |->, i.e. |c(t)|.
double dephasing_trace_distance(const ModelParams& params, double t);

// Uniform grid on [0, t_max] with `per_unit_rate` points per unit 1/lambda,
// with the coherence zero (when the finite-reservoir coherence has one)
// inserted so the minimum of the trace distance is sampled exactly.
std::vector<double> blp_grid(const ModelParams& params, double t_max, double per_unit_rate = 100.0);

// BLP measure of the analytic dynamics on blp_grid(params, t_max).
double blp_of_model(const ModelParams& params, double t_max, double per_unit_rate = 100.0);

enum class Backend { Analytic, MonteCarlo };

struct MonteCarloOptions {
    std::uint64_t n_traj = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

struct InvarianceResult {
    double max_deviation = 0.0; // max |c_pair(t) - e^{-C t}|
    double max_sigma = 0.0;     // same, in units of the Monte-Carlo standard error
    double within_3sigma = 1.0; // fraction of (pair, t) points with deviation <= 3 stderr
};

// Checks that every (lambda, theta) pair with lambda (1 - cos theta) = C
// yields the decoherence factor e^{-C t} on the infinite reservoir.
InvarianceResult invariance_scan(double c_target, std::span<const std::pair<double, double>> pairs,
                                 std::span<const double> t_grid, Backend backend = Backend::Analytic,
                                 const MonteCarloOptions& mc = {});

} // namespace dynmix::analysis
