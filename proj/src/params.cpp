#include "dynmix/params.hpp"

#include <cmath>
#include <numbers>

#include "dynmix/error.hpp"

namespace dynmix {

AncillaCount AncillaCount::finite(std::uint64_t n) {
    if (n == 0) throw DomainError("ancilla count must be at least 1");
    AncillaCount c;
    c.finite_ = true;
    c.n_ = n;
    return c;
}

std::uint64_t AncillaCount::value() const {
    if (!finite_) throw DomainError("ancilla count is infinite");
    return n_;
}

std::string AncillaCount::str() const { return finite_ ? std::to_string(n_) : "inf"; }

double canonical_angle(double theta) {
    if (!std::isfinite(theta)) throw DomainError("angle must be finite");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(theta, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

ModelParams::ModelParams(double theta, double lambda, double omega, AncillaCount n)
    : theta_(canonical_angle(theta)), lambda_(lambda), omega_(omega), n_(n) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("collision rate lambda must be positive and finite");
    if (!std::isfinite(omega)) throw DomainError("qubit frequency omega must be finite");
}

double ModelParams::dephasing_rate() const { return lambda_ * (1.0 - std::cos(theta_)); }

bool ModelParams::is_non_entangling() const { return std::abs(std::cos(theta_) + 1.0) <= 1e-12; }

} // namespace dynmix
