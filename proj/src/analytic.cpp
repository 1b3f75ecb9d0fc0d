#include "dynmix/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynmix/error.hpp"

namespace dynmix::analytic {

namespace {

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
}

std::uint64_t require_finite(const ModelParams& params, const char* what) {
    if (!params.n().is_finite()) throw DomainError(std::string(what) + " needs a finite number of ancillae");
    return params.n().value();
}

void require_non_entangling(const ModelParams& params, const char* what) {
    if (!params.is_non_entangling()) {
        throw DomainError(std::string(what) + " is only derived for the non-entangling collision cos(theta) = -1");
    }
}

// x - 1 where x = 2 e^{-lambda t / n} - 1 is the even-minus-odd parity bias
// of a single ancilla.
double parity_bias_minus_one(const ModelParams& params, double t) {
    const double n = static_cast<double>(params.n().value());
    return 2.0 * std::expm1(-params.lambda() * t / n);
}

} // namespace

std::string to_string(Setting setting) {
    return setting == Setting::AncillaeOnly ? "ancillae" : "emitters";
}

Setting parse_setting(const std::string& text) {
    if (text == "ancillae") return Setting::AncillaeOnly;
    if (text == "emitters") return Setting::WithEmitters;
    throw UsageError("unknown setting '" + text + "' (expected ancillae or emitters)");
}

double pow1p(double delta, std::uint64_t m) {
    if (m == 0) return 1.0;
    const double base = 1.0 + delta;
    if (base == 0.0) return 0.0;
    const double mag = base > 0.0 ? std::log1p(delta) : std::log(-base);
    const double value = std::exp(static_cast<double>(m) * mag);
    return (base < 0.0 && (m % 2 == 1)) ? -value : value;
}

qcore::Complex coherence_inf(const ModelParams& params, double t) {
    require_time(t);
    return std::polar(std::exp(-params.dephasing_rate() * t), -params.omega() * t);
}

double coherence_finite(const ModelParams& params, double t) {
    require_time(t);
    const std::uint64_t n = require_finite(params, "coherence_finite");
    // (cos theta - 1)(1 - e^{-s}) = (1 - cos theta) expm1(-s)
    const double delta = (1.0 - std::cos(params.theta())) * std::expm1(-params.lambda() * t / static_cast<double>(n));
    return pow1p(delta, n);
}

double coherence_factor(const ModelParams& params, double t) {
    require_time(t);
    return params.n().is_finite() ? coherence_finite(params, t) : std::exp(-params.dephasing_rate() * t);
}

double mixture_time(const ModelParams& params) {
    const std::uint64_t n = require_finite(params, "mixture_time");
    require_non_entangling(params, "mixture_time");
    return static_cast<double>(n) * std::numbers::ln2 / params.lambda();
}

double coherence_zero_time(const ModelParams& params) {
    const std::uint64_t n = require_finite(params, "coherence_zero_time");
    const double c = std::cos(params.theta());
    if (!(c < 0.0)) throw DomainError("finite-reservoir coherence only vanishes for cos(theta) < 0");
    const double p_star = 1.0 / (1.0 - c);
    return -static_cast<double>(n) / params.lambda() * std::log1p(-p_star);
}

double p_even(std::uint64_t m, const ModelParams& params, double t) {
    require_time(t);
    const std::uint64_t n = require_finite(params, "p_even");
    if (m > n) throw DomainError("p_even: m = " + std::to_string(m) + " exceeds n = " + std::to_string(n));
    const double p = 0.5 * (1.0 + pow1p(parity_bias_minus_one(params, t), m));
    return std::clamp(p, 0.0, 1.0);
}

double binary_entropy(double p) {
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw DomainError("binary_entropy: probability outside [0, 1]");
    p = std::clamp(p, 0.0, 1.0);
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double mi_ancillae(const ModelParams& params, double t, std::uint64_t k) {
    require_non_entangling(params, "mi_ancillae");
    const std::uint64_t n = require_finite(params, "mi_ancillae");
    if (k > n) throw DomainError("mi_ancillae: k outside [0, n]");
    return binary_entropy(p_even(n, params, t)) - binary_entropy(p_even(k, params, t));
}

double mi_emitters(const ModelParams& params, double t, std::uint64_t k) {
    require_non_entangling(params, "mi_emitters");
    const std::uint64_t n = require_finite(params, "mi_emitters");
    if (k > n) throw DomainError("mi_emitters: k outside [0, n]");
    return binary_entropy(p_even(n, params, t)) + binary_entropy(p_even(n - k, params, t)) -
           binary_entropy(p_even(k, params, t));
}

double system_entropy(const ModelParams& params, double t) {
    require_non_entangling(params, "system_entropy");
    return binary_entropy(p_even(require_finite(params, "system_entropy"), params, t));
}

qcore::DensityMatrix dynamical_map(const ModelParams& params, double t, const qcore::DensityMatrix& rho0) {
    if (rho0.num_qubits() != 1) throw DomainError("dynamical_map acts on a single qubit");
    const qcore::Complex c = coherence_factor(params, t) * std::polar(1.0, -params.omega() * t);
    qcore::Matrix m = rho0.data();
    m(0, 1) *= c;
    m(1, 0) *= std::conj(c);
    return qcore::DensityMatrix(rho0.labels(), std::move(m));
}

std::uint64_t k_from_fraction(double f, std::uint64_t n) {
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("environment fraction must lie in [0, 1]");
    const double k = std::nearbyint((1.0 - f) * static_cast<double>(n));
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(k, 0.0)), n);
}

std::vector<double> uniform_fractions(std::size_t intervals) {
    if (intervals == 0) throw DomainError("need at least one fraction interval");
    std::vector<double> f(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) f[i] = static_cast<double>(i) / static_cast<double>(intervals);
    return f;
}

MICurve mi_curve(const ModelParams& params, double t, Setting setting, std::span<const double> fractions) {
    MICurve curve;
    curve.time = t;
    curve.n = require_finite(params, "mi_curve");
    curve.setting = setting;
    curve.h_system = system_entropy(params, t);
    curve.points.reserve(fractions.size());
    for (double f : fractions) {
        const std::uint64_t k = k_from_fraction(f, curve.n);
        const double i_f = setting == Setting::AncillaeOnly ? mi_ancillae(params, t, k) : mi_emitters(params, t, k);
        curve.points.push_back({f, k, i_f});
    }
    std::stable_sort(curve.points.begin(), curve.points.end(),
                     [](const MIPoint& a, const MIPoint& b) { return a.f < b.f; });
    return curve;
}

} // namespace dynmix::analytic
