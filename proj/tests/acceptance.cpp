// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dynmix/analysis.hpp"
#include "dynmix/analytic.hpp"
#include "dynmix/collision.hpp"
#include "dynmix/oracle.hpp"
#include "dynmix/stochastic.hpp"

using namespace dynmix;
using analytic::Setting;
using qcore::Complex;
using qcore::QubitLabel;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr std::uint64_t kSeed = 20190601;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, auto... args) {
        char buf[256];
        if constexpr (sizeof...(args) == 0) {
            std::snprintf(buf, sizeof buf, "%s", fmt);
        } else {
            std::snprintf(buf, sizeof buf, fmt, args...);
        }
        if (!detail.empty()) detail += "; ";
        detail += ok ? "" : "[x] ";
        detail += buf;
        pass = pass && ok;
    }
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> linspace(double a, double b, std::size_t points) {
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    return out;
}

ModelParams reservoir(std::uint64_t n, double theta = kPi, double lambda = 1.0) {
    return ModelParams(theta, lambda, 0.0, AncillaCount::finite(n));
}

Verdict closed_form_dephasing() {
    Verdict v;
    const auto t0 = Clock::now();
    stochastic::CounterRng rng(kSeed, 1);
    const auto grid = linspace(0.0, 5.0, 201);
    const auto plus = qcore::projector(QubitLabel::system(), qcore::ket_plus());
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double theta = kPi * (2.0 * rng.uniform() - 1.0);
        const double lambda = 0.1 + 2.9 * rng.uniform();
        const double omega = 10.0 * rng.uniform() - 5.0;
        const ModelParams p(theta, lambda, omega, AncillaCount::infinite());
        const auto states = collision::integrate_gksl(plus, p, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const Complex c = 2.0 * states[j].data()(0, 1);
            worst = std::max(worst, std::abs(c - std::exp(-grid[j] * Complex(lambda * (1 - std::cos(theta)), omega))));
        }
    }
    const double secs = since(t0);
    v.require(worst < 1e-8, "max deviation %.3g (< 1e-8)", worst);
    v.require(secs < 5.0, "runtime %.2f s (< 5 s)", secs);
    return v;
}

Verdict invariance() {
    Verdict v;
    const std::vector<std::pair<double, double>> pairs = {{1.0, kPi / 2}, {2.0, kPi / 3}, {0.5, kPi}};
    const auto grid = linspace(0.0, 5.0, 500);
    const auto rho0 = qcore::projector(QubitLabel::system(), Eigen::Vector2cd(0.6, Complex(0.0, 0.8)));
    double worst = 0.0;
    for (double t : grid) {
        const auto ref = analytic::dynamical_map(ModelParams(pairs[0].second, pairs[0].first, 0.0, AncillaCount::infinite()), t, rho0);
        for (std::size_t i = 1; i < pairs.size(); ++i) {
            const ModelParams p(pairs[i].second, pairs[i].first, 0.0, AncillaCount::infinite());
            worst = std::max(worst, (analytic::dynamical_map(p, t, rho0).data() - ref.data()).cwiseAbs().maxCoeff());
        }
    }
    v.require(worst < 1e-12, "analytic map spread %.3g (< 1e-12)", worst);
    const auto mc = analysis::invariance_scan(1.0, pairs, grid, analysis::Backend::MonteCarlo, {100000, kSeed, 0});
    v.require(mc.within_3sigma >= 0.95, "MC points within 3 stderr %.4f (>= 0.95), max |z| %.2f", mc.within_3sigma,
              mc.max_sigma);
    return v;
}

Verdict finite_reservoir_shape() {
    Verdict v;
    const auto t0 = Clock::now();
    double root_err = 0.0;
    bool signs = true;
    double prev_width = 0.0;
    bool widening = true;
    for (std::uint64_t n : {1, 2, 3, 4, 10}) {
        const auto p = reservoir(n);
        const auto c = [&](double t) { return analytic::coherence_finite(p, t); };
        // c_n(t; lambda) = c_1(t; lambda / n)^n: bracket the single-ancilla factor so
        // even n (double zero, no sign change in c_n) is covered too
        const auto single = reservoir(1, kPi, 1.0 / n);
        const auto base = [&](double t) { return analytic::coherence_finite(single, t); };
        double lo = 0.0, hi = 4.0 * n;
        if (base(lo) * base(hi) > 0) signs = false;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (base(lo) * base(mid) <= 0 ? hi : lo) = mid;
        }
        root_err = std::max(root_err, std::abs(0.5 * (lo + hi) - n * kLn2));
        if (std::abs(c(2.0 * n) - std::pow(base(2.0 * n), n)) > 1e-12) signs = false;
        const double tail = c(80.0 * n);
        if ((tail > 0) != (n % 2 == 0)) signs = false;
        double width = 0.0;
        const double dt = 1e-3 * n;
        for (double t = 0.0; t < 10.0 * n; t += dt) width += std::abs(c(t)) < 0.05 ? dt : 0.0;
        if (!(width > prev_width)) widening = false;
        prev_width = width;
    }
    const double secs = since(t0);
    v.require(root_err < 1e-9, "zero crossing vs n ln2 %.3g (< 1e-9)", root_err);
    v.require(signs, "asymptote sign (-1)^n");
    v.require(widening, "|c| < 0.05 window grows with n (n = 10 width %.3f)", prev_width);
    v.require(secs < 1.0, "runtime %.3f s (< 1 s)", secs);
    return v;
}

double ratio_bound(const analytic::MICurve& curve, double f_lo, double f_hi, bool want_max) {
    double out = want_max ? -1e300 : 1e300;
    for (const auto& pt : curve.points) {
        if (pt.f < f_lo - 1e-12 || pt.f > f_hi + 1e-12) continue;
        const double r = pt.i_f / curve.h_system;
        out = want_max ? std::max(out, r) : std::min(out, r);
    }
    return out;
}

Verdict ancillae_curve() {
    Verdict v;
    const auto p = reservoir(10000);
    const auto t0 = Clock::now();
    const auto curve = analytic::mi_curve(p, analytic::mixture_time(p), Setting::AncillaeOnly, analytic::uniform_fractions(200));
    const double secs = since(t0);
    const double top = ratio_bound(curve, 0.0, 0.99, true);
    const double at_one = curve.points.back().i_f / curve.h_system;
    v.require(top < 0.01, "max ratio for f <= 0.99 is %.3g (< 0.01)", top);
    v.require(std::abs(at_one - 1.0) < 1e-9, "ratio at f = 1 is %.12f", at_one);
    v.require(secs < 1.0, "200-point evaluation %.4f s (< 1 s)", secs);
    return v;
}

Verdict emitter_curve() {
    Verdict v;
    const auto p = reservoir(10000);
    const double tm = analytic::mixture_time(p);
    const auto fractions = analytic::uniform_fractions(200);
    const auto at_tm = analytic::mi_curve(p, tm, Setting::WithEmitters, fractions);
    const double lo = ratio_bound(at_tm, 0.01, 0.99, false), hi = ratio_bound(at_tm, 0.01, 0.99, true);
    v.require(lo >= 0.99 && hi <= 1.01, "t = t_m: ratio in [%.6f, %.6f] within [0.99, 1.01]", lo, hi);
    const auto early = analytic::mi_curve(p, 0.1 * tm, Setting::WithEmitters, fractions);
    const double elo = ratio_bound(early, 0.01, 0.99, false), ehi = ratio_bound(early, 0.01, 0.99, true);
    const bool absent = elo < 0.99 || ehi > 1.01;
    v.require(absent, "t = 0.1 t_m: plateau must be absent, ratio in [%.15f, %.15f]", elo, ehi);
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    const auto t0 = Clock::now();
    double worst_a = 0.0, worst_e = 0.0;
    for (std::uint64_t n = 2; n <= 8; ++n) {
        const auto p = reservoir(n);
        const double tm = analytic::mixture_time(p);
        for (double t : {0.3, 1.0, tm, 3.0 * tm}) {
            const auto rho = oracle::build_state_ancillae(p, t);
            const auto psi = oracle::build_state_emitters(p, t);
            for (std::uint64_t k = 0; k <= n; ++k) {
                worst_a = std::max(worst_a, std::abs(oracle::mi_bruteforce(rho, oracle::leading_units(n - k, Setting::AncillaeOnly)) -
                                                     analytic::mi_ancillae(p, t, k)));
                worst_e = std::max(worst_e, std::abs(oracle::mi_bruteforce(psi, oracle::leading_units(n - k, Setting::WithEmitters)) -
                                                     analytic::mi_emitters(p, t, k)));
            }
        }
    }
    const double secs = since(t0);
    v.require(worst_a < 1e-9, "ancillae %.3g (< 1e-9)", worst_a);
    v.require(worst_e < 1e-9, "emitters %.3g (< 1e-9)", worst_e);
    v.require(secs < 60.0, "runtime %.2f s (< 60 s)", secs);
    return v;
}

// Smallest eigenvalue of the partial transpose over every bipartition.
double min_ppt_eigenvalue(const qcore::DensityMatrix& rho) {
    const auto& labels = rho.labels();
    const std::size_t m = labels.size();
    double lowest = 1.0;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
        std::vector<QubitLabel> part;
        for (std::size_t i = 0; i < m; ++i)
            if (mask >> i & 1) part.push_back(labels[i]);
        Eigen::SelfAdjointEigenSolver<qcore::Matrix> es(qcore::partial_transpose(rho, part));
        lowest = std::min(lowest, es.eigenvalues().minCoeff());
    }
    return lowest;
}

Verdict separability() {
    Verdict v;
    double conc = 0.0;
    for (double th : linspace(-kPi, kPi, 50)) {
        conc = std::max(conc, std::abs(qcore::concurrence(collision::single_collision_state(th)) - std::abs(std::sin(th))));
    }
    const double at_pi = qcore::concurrence(collision::single_collision_state(kPi));
    const double at_half = qcore::concurrence(collision::single_collision_state(kPi / 2));
    v.require(std::abs(at_pi) < 1e-10 && std::abs(at_half - 1.0) < 1e-10, "C(pi) = %.2g, C(pi/2) = %.12f", at_pi, at_half);
    v.require(conc < 1e-10, "|C - |sin theta|| on 50 angles %.3g", conc);

    double coherence = 0.0, ppt = 1.0, cut = 0.0;
    for (std::uint64_t n = 1; n <= 8; ++n) {
        const auto p = reservoir(n);
        const double tm = analytic::mixture_time(p);
        const auto rho = oracle::build_state_ancillae(p, tm);
        coherence = std::max(coherence, oracle::max_ancilla_coherence(rho));
        if (n <= 5) ppt = std::min(ppt, min_ppt_eigenvalue(rho));
        const QubitLabel s[] = {QubitLabel::system()};
        cut = std::max(cut, std::abs(oracle::cut_entanglement(oracle::build_state_emitters(p, tm), s) -
                                     analytic::system_entropy(p, tm)));
    }
    v.require(coherence <= 1e-12, "ancillae state diagonal in the ancilla basis (max off-diagonal %.2g)", coherence);
    v.require(ppt > -1e-12, "every cut PPT for n <= 5 (min eigenvalue %.2g)", ppt);
    v.require(cut < 1e-9, "emitter cut entropy vs H_S %.3g (< 1e-9)", cut);
    return v;
}

Verdict non_markovianity() {
    Verdict v;
    const double inf = analysis::blp_of_model(ModelParams(kPi, 1.0, 0.0, AncillaCount::infinite()), 30.0);
    v.require(inf <= 1e-9, "infinite reservoir %.3g", inf);
    double orth = 0.0;
    for (std::uint64_t n : {1, 2, 3, 10, 100}) orth = std::max(orth, analysis::blp_of_model(reservoir(n, kPi / 2), 50.0));
    v.require(orth <= 1e-9, "cos theta = 0 %.3g", orth);
    const auto p = reservoir(1);
    const auto grid = analysis::blp_grid(p, 20.0);
    std::vector<double> d;
    for (double t : grid) d.push_back(std::abs(2.0 * std::exp(-t) - 1.0));
    const double reference = analysis::blp_measure(grid, d, 1.0);
    const double model = analysis::blp_of_model(p, 20.0);
    v.require(std::abs(model - 1.0) < 1e-6 && std::abs(model - reference) < 1e-12,
              "n = 1: BLP %.12f, from |2e^-t - 1| %.12f", model, reference);
    return v;
}

Verdict monte_carlo() {
    Verdict v;
    const auto grid = linspace(0.0, 12.0, 241);
    for (const auto& p : {ModelParams(2 * kPi / 3, 1.0, 0.5, AncillaCount::infinite()), reservoir(10)}) {
        const stochastic::TrajectorySpec spec{p, grid, 100000, kSeed, 0, std::nullopt};
        const auto a = stochastic::estimate_coherence(spec);
        const auto b = stochastic::estimate_coherence(spec);
        std::size_t inside = 0;
        bool same = true;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const Complex exact = p.n().is_finite() ? Complex(analytic::coherence_finite(p, grid[j])) : analytic::coherence_inf(p, grid[j]);
            inside += std::abs(a.points[j].mean_coherence - exact) <= 3.0 * a.points[j].std_error + 1e-15;
            same = same && std::memcmp(&a.points[j], &b.points[j], sizeof(stochastic::TimePointStats)) == 0;
        }
        const double frac = static_cast<double>(inside) / grid.size();
        v.require(frac >= 0.95, "%s: %.4f of points within 3 stderr", p.n().is_finite() ? "n = 10" : "n = inf", frac);
        v.require(same, "%s: identical bytes across two runs", p.n().is_finite() ? "n = 10" : "n = inf");
    }
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"1 closed-form dephasing (GKSL vs exponential)", closed_form_dephasing},
        {"2 dephasing-rate invariance", invariance},
        {"3 finite-reservoir coherence shape", finite_reservoir_shape},
        {"4 ancillae-only mutual information", ancillae_curve},
        {"5 emitter plateau at t_m and absent at 0.1 t_m", emitter_curve},
        {"6 oracle equivalence", oracle_equivalence},
        {"7 separability vs entanglement", separability},
        {"8 non-Markovianity (BLP)", non_markovianity},
        {"9 Monte-Carlo statistics and determinism", monte_carlo},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s  %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
