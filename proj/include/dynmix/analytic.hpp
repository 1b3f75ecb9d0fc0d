#pragma once

// Closed-form results of the stochastic collision model.
//
// Finite-reservoir quantities are written in terms of the per-ancilla
// survival factor x = 2 e^{-lambda t / n} - 1, whose powers are evaluated
// with sign tracking in log space so that n, m ~ 1e4 neither underflow
// nor lose the (-1)^m parity.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynmix/params.hpp"
#include "dynmix/qcore.hpp"

namespace dynmix::analytic {

enum class Setting { AncillaeOnly, WithEmitters };

std::string to_string(Setting setting);
// Accepts "ancillae" / "emitters"; throws UsageError otherwise.
Setting parse_setting(const std::string& text);

struct MIPoint {
    double f = 0.0;
    std::uint64_t k = 0; // number of traced-out environment units
    double i_f = 0.0;    // bits
};

struct MICurve {
    double time = 0.0;
    std::uint64_t n = 0;
    std::vector<MIPoint> points; // sorted by f
    double h_system = 0.0;       // bits
    Setting setting = Setting::AncillaeOnly;
};

// (1 + delta)^m without forming 1 + delta when |delta| is tiny.
double pow1p(double delta, std::uint64_t m);

// e^{-i omega t} e^{-lambda (1 - cos theta) t}
qcore::Complex coherence_inf(const ModelParams& params, double t);

// [1 + (cos theta - 1)(1 - e^{-lambda t / n})]^n, finite n only.
double coherence_finite(const ModelParams& params, double t);

// Real decoherence factor (free phase removed) for either reservoir.
double coherence_factor(const ModelParams& params, double t);

// n ln 2 / lambda; defined only for cos theta = -1 and finite n.
double mixture_time(const ModelParams& params);

// First zero of coherence_finite, which exists whenever cos theta < 0.
double coherence_zero_time(const ModelParams& params);

// Probability that m of the n ancillae produced an even number of collisions.
double p_even(std::uint64_t m, const ModelParams& params, double t);

// Base-2 binary entropy with H(0) = H(1) = 0.
double binary_entropy(double p);

// I_f for the ancillae-only environment; k ancillae traced out.
double mi_ancillae(const ModelParams& params, double t, std::uint64_t k);

// I_f when the environment fraction is made of emitter-ancilla pairs.
double mi_emitters(const ModelParams& params, double t, std::uint64_t k);

double system_entropy(const ModelParams& params, double t);

// Applies the integrated dynamical map (finite or infinite reservoir) to a
// single-qubit initial state.
qcore::DensityMatrix dynamical_map(const ModelParams& params, double t, const qcore::DensityMatrix& rho0);

// k = round((1 - f) n) with ties to even.
std::uint64_t k_from_fraction(double f, std::uint64_t n);

// intervals + 1 evenly spaced fractions 0, 1/intervals, ..., 1.
std::vector<double> uniform_fractions(std::size_t intervals);

MICurve mi_curve(const ModelParams& params, double t, Setting setting, std::span<const double> fractions);

} // namespace dynmix::analytic
