#include <chrono>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "dynmix/analytic.hpp"
#include "dynmix/collision.hpp"
#include "dynmix/error.hpp"

using namespace dynmix;
using namespace dynmix::analytic;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams reservoir(std::uint64_t n, double theta = kPi, double lambda = 1.0) {
    return ModelParams(theta, lambda, 0.0, AncillaCount::finite(n));
}

double binom_pmf(std::uint64_t n, std::uint64_t m, double p) {
    if (p == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) + m * std::log(p) +
                    (n - m) * std::log1p(-p));
}

// Each of n ancillae has fired by time t with probability 1 - e^{-lambda t / n}
// independently; a fired ancilla contributes one factor cos theta.
double coherence_by_sum(std::uint64_t n, double theta, double lambda, double t) {
    const double p = -std::expm1(-lambda * t / n);
    double s = 0.0;
    for (std::uint64_t m = 0; m <= n; ++m) s += binom_pmf(n, m, p) * std::pow(std::cos(theta), m);
    return s;
}

double p_even_by_sum(std::uint64_t m, double lambda, std::uint64_t n, double t) {
    const double p = -std::expm1(-lambda * t / n);
    double s = 0.0;
    for (std::uint64_t j = 0; j <= m; j += 2) s += binom_pmf(m, j, p);
    return s;
}

double hb(double p) { return (p <= 0 || p >= 1) ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

} // namespace

TEST_CASE("params canonicalise the angle and validate the rate") {
    CHECK(ModelParams(3 * kPi, 1.0, 0.0, AncillaCount::infinite()).theta() == doctest::Approx(kPi));
    CHECK(ModelParams(-kPi, 1.0, 0.0, AncillaCount::infinite()).is_non_entangling());
    CHECK_THROWS_AS(ModelParams(1.0, 0.0, 0.0, AncillaCount::infinite()), DomainError);
    CHECK_THROWS_AS(AncillaCount::finite(0), DomainError);
    CHECK(AncillaCount::infinite().str() == "inf");
}

TEST_CASE("infinite reservoir: e^{-lambda (1 - cos theta) t} with the free phase") {
    const ModelParams p(kPi / 2, 1.0, 0.0, AncillaCount::infinite());
    for (double t : {0.0, 0.5, 1.0, 4.0}) CHECK(coherence_factor(p, t) == doctest::Approx(std::exp(-t)));
    const ModelParams q(2.0, 0.7, 1.5, AncillaCount::infinite());
    const auto c = coherence_inf(q, 1.2);
    CHECK(std::abs(c - std::exp(-1.2 * qcore::Complex(0.7 * (1 - std::cos(2.0)), 1.5))) < 1e-15);
    CHECK(coherence_factor(ModelParams(0.0, 1.0, 0.0, AncillaCount::infinite()), 9.0) == 1.0);
}

TEST_CASE("finite reservoir matches the binomial sum over fired ancillae") {
    for (std::uint64_t n : {1, 2, 5, 17, 60}) {
        for (double th : {kPi, kPi / 2, 1.0, 2.5}) {
            for (double t : {0.0, 0.3, 2.0, 11.0}) {
                CHECK(coherence_finite(reservoir(n, th, 1.3), t) ==
                      doctest::Approx(coherence_by_sum(n, th, 1.3, t)).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("property: finite reservoir converges to the infinite one") {
    const ModelParams inf(2.0, 1.0, 0.0, AncillaCount::infinite());
    for (double t : {0.5, 2.0, 5.0}) {
        double prev = 1e9;
        for (std::uint64_t n : {10, 100, 1000, 100000}) {
            const double err = std::abs(coherence_finite(reservoir(n, 2.0), t) - coherence_factor(inf, t));
            CHECK(err <= prev + 1e-15);
            prev = err;
        }
        CHECK(prev < 1e-4);
    }
}

TEST_CASE("mixture time and zero crossing") {
    for (std::uint64_t n : {1, 2, 3, 4, 10, 1000}) {
        const auto p = reservoir(n);
        CHECK(mixture_time(p) == doctest::Approx(n * std::numbers::ln2));
        CHECK(std::abs(coherence_finite(p, mixture_time(p))) < 1e-15);
        CHECK(coherence_zero_time(p) == doctest::Approx(mixture_time(p)));
    }
    CHECK(mixture_time(reservoir(4, kPi, 2.0)) == doctest::Approx(2 * std::numbers::ln2));
    CHECK_THROWS_AS(mixture_time(reservoir(4, kPi / 2)), DomainError);
    CHECK_THROWS_AS(mixture_time(ModelParams(kPi, 1.0, 0.0, AncillaCount::infinite())), DomainError);
    // for cos theta in (-1, 0) the zero moves later
    const auto q = reservoir(5, 2.0);
    CHECK(std::abs(coherence_finite(q, coherence_zero_time(q))) < 1e-14);
    CHECK_THROWS_AS(coherence_zero_time(reservoir(5, 1.0)), DomainError);
}

TEST_CASE("asymptotic sign of the finite-reservoir coherence is (-1)^n") {
    for (std::uint64_t n : {1, 2, 3, 4, 10}) {
        const double c = coherence_finite(reservoir(n), 50.0 * n);
        CHECK((c > 0) == (n % 2 == 0));
        CHECK(std::abs(std::abs(c) - 1.0) < 1e-6);
    }
}

TEST_CASE("even-collision probability matches the binomial sum") {
    for (std::uint64_t n : {3, 10, 40}) {
        for (std::uint64_t m : {std::uint64_t{0}, std::uint64_t{1}, n / 2, n}) {
            for (double t : {0.0, 0.4, 3.0, 25.0}) {
                CHECK(p_even(m, reservoir(n), t) == doctest::Approx(p_even_by_sum(m, 1.0, n, t)).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(p_even(11, reservoir(10), 1.0), DomainError);
}

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.11) == doctest::Approx(hb(0.11)));
    CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
}

TEST_CASE("mutual information endpoints") {
    const auto p = reservoir(12);
    const double t = 3.0;
    const double hs = system_entropy(p, t);
    CHECK(hs == doctest::Approx(hb(p_even(12, p, t))));
    // no environment kept -> no information; everything kept -> H_S (mixed) or 2 H_S (pure)
    CHECK(mi_ancillae(p, t, 12) == doctest::Approx(0.0));
    CHECK(mi_emitters(p, t, 12) == doctest::Approx(0.0));
    CHECK(mi_ancillae(p, t, 0) == doctest::Approx(hs));
    CHECK(mi_emitters(p, t, 0) == doctest::Approx(2 * hs));
    CHECK_THROWS_AS(mi_ancillae(p, t, 13), DomainError);
    CHECK_THROWS_AS(mi_emitters(reservoir(12, 1.0), t, 3), DomainError);
}

TEST_CASE("property: mutual information is non-negative and monotone in the kept fraction") {
    for (std::uint64_t n : {5, 30}) {
        for (double t : {0.2, 1.0, 8.0}) {
            const auto p = reservoir(n);
            for (std::uint64_t k = 1; k <= n; ++k) {
                CHECK(mi_ancillae(p, t, k) >= -1e-12);
                CHECK(mi_ancillae(p, t, k) <= mi_ancillae(p, t, k - 1) + 1e-12);
                CHECK(mi_emitters(p, t, k) <= mi_emitters(p, t, k - 1) + 1e-12);
                CHECK(mi_emitters(p, t, k) <= 2 * system_entropy(p, t) + 1e-12);
            }
        }
    }
}

TEST_CASE("dynamical map preserves populations and scales coherences") {
    const auto plus = qcore::projector(qcore::QubitLabel::system(), qcore::ket_plus());
    const ModelParams p(kPi, 1.0, 0.8, AncillaCount::finite(3));
    const auto out = dynamical_map(p, 1.7, plus);
    CHECK(std::abs(out.data()(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(2.0 * out.data()(0, 1) - coherence_finite(p, 1.7) * std::polar(1.0, -0.8 * 1.7)) < 1e-14);
}

TEST_CASE("fractions and k") {
    CHECK(k_from_fraction(0.0, 10) == 10);
    CHECK(k_from_fraction(1.0, 10) == 0);
    CHECK(k_from_fraction(0.25, 10) == 8); // 7.5 rounds to even
    const auto f = uniform_fractions(4);
    REQUIRE(f.size() == 5);
    CHECK(f[2] == 0.5);
    CHECK_THROWS_AS(parse_setting("both"), UsageError);
    CHECK(parse_setting(to_string(Setting::WithEmitters)) == Setting::WithEmitters);
}

TEST_CASE("ancillae-only curve at the mixture time carries no redundant information") {
    const auto p = reservoir(10000);
    const double tm = mixture_time(p);
    const auto curve = mi_curve(p, tm, Setting::AncillaeOnly, uniform_fractions(200));
    CHECK(curve.h_system == doctest::Approx(1.0));
    for (const auto& pt : curve.points) {
        if (pt.f <= 0.99) CHECK(pt.i_f / curve.h_system < 0.01);
    }
    CHECK(curve.points.back().i_f / curve.h_system == doctest::Approx(1.0));
}

TEST_CASE("emitter curve at the mixture time sits on the plateau") {
    const auto p = reservoir(10000);
    const auto start = std::chrono::steady_clock::now();
    const auto curve = mi_curve(p, mixture_time(p), Setting::WithEmitters, uniform_fractions(200));
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 1.0);
    for (const auto& pt : curve.points) {
        if (pt.f >= 0.01 && pt.f <= 0.99) {
            CHECK(pt.i_f / curve.h_system >= 0.99);
            CHECK(pt.i_f / curve.h_system <= 1.01);
        }
    }
}
