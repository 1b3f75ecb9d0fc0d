#pragma once

#include <cstdint>
#include <string>

namespace dynmix {

// Number of ancillae in the environment: a positive integer, or the
// infinite reservoir of the Poisson collision model.
class AncillaCount {
  public:
    static AncillaCount infinite() { return AncillaCount(); }
    static AncillaCount finite(std::uint64_t n);

    bool is_finite() const { return finite_; }
    // Throws DomainError for the infinite reservoir.
    std::uint64_t value() const;
    std::string str() const;

    friend bool operator==(const AncillaCount&, const AncillaCount&) = default;

  private:
    AncillaCount() = default;
    bool finite_ = false;
    std::uint64_t n_ = 0;
};

// Maps any finite angle onto (-pi, pi].
double canonical_angle(double theta);

// theta: collision strength (radians), lambda: collision rate, omega: qubit
// frequency, n: ancilla count. Construction validates and canonicalizes.
class ModelParams {
  public:
    ModelParams(double theta, double lambda, double omega, AncillaCount n);

    double theta() const { return theta_; }
    double lambda() const { return lambda_; }
    double omega() const { return omega_; }
    const AncillaCount& n() const { return n_; }

    // lambda * (1 - cos theta); the dephasing rate of the infinite model.
    double dephasing_rate() const;

    // cos(theta) == -1 to within 1e-12: the entanglement-free collision.
    bool is_non_entangling() const;

  private:
    double theta_;
    double lambda_;
    double omega_;
    AncillaCount n_;
};

} // namespace dynmix
