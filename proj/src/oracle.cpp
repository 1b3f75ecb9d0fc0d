#include "dynmix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dynmix/collision.hpp"
#include "dynmix/error.hpp"
#include "dynmix/stochastic.hpp"

namespace dynmix::oracle {

namespace {

using Index = Eigen::Index;
using qcore::Complex;

// Amplitudes below this are treated as structural zeros when accumulating
// rank-one terms; cos(pi/2) in double precision is ~6e-17.
constexpr double kAmplitudeFloor = 1e-15;

std::uint64_t require_oracle_params(const ModelParams& params, double t) {
    if (!params.n().is_finite()) throw DomainError("the oracle needs a finite number of ancillae");
    const std::uint64_t n = params.n().value();
    if (n > kMaxAncillae) {
        throw CapacityError("oracle limited to n <= " + std::to_string(kMaxAncillae) + " ancillae, got " +
                            std::to_string(n));
    }
    if (!params.is_non_entangling()) throw DomainError("oracle states are only defined for theta = pi");
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
    return n;
}

// Applies a two-qubit gate to (ancilla i, system) of a register ordered
// [a_0 .. a_{n-1}, S]; the ancilla is the more significant factor.
void apply_collision(qcore::Vector& phi, const Eigen::Matrix4cd& u, std::uint64_t n, std::uint64_t i) {
    const Index abit = Index{1} << (n - i);
    const Index dim = phi.size();
    for (Index base = 0; base < dim; ++base) {
        if ((base & abit) != 0 || (base & 1) != 0) continue;
        const Index idx[4] = {base, base | 1, base | abit, base | abit | 1};
        Eigen::Vector4cd v;
        for (int r = 0; r < 4; ++r) v(r) = phi(idx[r]);
        v = u * v;
        for (int r = 0; r < 4; ++r) phi(idx[r]) = v(r);
    }
}

// Ancillae + system state of one collision history.
qcore::Vector history_state(const ModelParams& params, double t, std::uint64_t n, const std::vector<std::uint8_t>& alpha,
                            const Eigen::Matrix4cd& u) {
    qcore::Vector phi = qcore::Vector::Zero(Index{1} << (n + 1));
    phi(0) = qcore::ket_plus()(0);
    phi(1) = qcore::ket_plus()(1);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (alpha[i]) apply_collision(phi, u, n, i);
    }
    const Complex down = std::polar(1.0, -0.5 * params.omega() * t);
    for (Index j = 0; j < phi.size(); ++j) phi(j) *= (j & 1) ? std::conj(down) : down;
    return phi;
}

qcore::LabelList system_and_ancillae(std::uint64_t n) {
    auto labels = qcore::ancilla_labels(n);
    labels.push_back(QubitLabel::system());
    return labels;
}

double subset_entropy(const PureStateVector& psi, const qcore::LabelList& part) {
    if (part.empty() || part.size() == psi.num_qubits()) return 0.0;
    return qcore::entanglement_entropy(psi, part);
}

} // namespace

double collision_probability(const ModelParams& params, double t) {
    return -std::expm1(-params.lambda() * t / static_cast<double>(params.n().value()));
}

std::vector<TrajectoryWeight> trajectory_weights(const ModelParams& params, double t) {
    const std::uint64_t n = require_oracle_params(params, t);
    const double p = collision_probability(params, t);
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<TrajectoryWeight> out(count);
    for (std::uint64_t w = 0; w < count; ++w) {
        auto& tw = out[w];
        tw.alpha.resize(n);
        double weight = 1.0;
        for (std::uint64_t i = 0; i < n; ++i) {
            tw.alpha[i] = static_cast<std::uint8_t>((w >> (n - 1 - i)) & 1);
            weight *= tw.alpha[i] ? p : 1.0 - p;
        }
        tw.weight = weight;
    }
    return out;
}

double even_parity_mass(std::span<const TrajectoryWeight> weights) {
    double mass = 0.0;
    for (const auto& w : weights) {
        if (std::accumulate(w.alpha.begin(), w.alpha.end(), 0u) % 2 == 0) mass += w.weight;
    }
    return mass;
}

DensityMatrix build_state_ancillae(const ModelParams& params, double t) {
    const std::uint64_t n = require_oracle_params(params, t);
    const auto weights = trajectory_weights(params, t);
    const Eigen::Matrix4cd u = collision::collision_unitary(params.theta());
    const Index dim = Index{1} << (n + 1);
    qcore::Matrix rho = qcore::Matrix::Zero(dim, dim);
    std::vector<Index> support;
    for (const auto& w : weights) {
        if (w.weight == 0.0) continue;
        const qcore::Vector phi = history_state(params, t, n, w.alpha, u);
        support.clear();
        for (Index j = 0; j < dim; ++j) {
            if (std::abs(phi(j)) > kAmplitudeFloor) support.push_back(j);
        }
        for (Index r : support) {
            for (Index c : support) rho(r, c) += w.weight * phi(r) * std::conj(phi(c));
        }
    }
    DensityMatrix state(system_and_ancillae(n), (rho + rho.adjoint()) * 0.5);
    if (max_ancilla_coherence(state) > 1e-12) {
        throw InvalidStateError("ancillae-only state is not classical on the ancillae");
    }
    return state;
}

PureStateVector build_state_emitters(const ModelParams& params, double t) {
    const std::uint64_t n = require_oracle_params(params, t);
    const auto weights = trajectory_weights(params, t);
    const Eigen::Matrix4cd u = collision::collision_unitary(params.theta());
    const Index inner = Index{1} << (n + 1);
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    qcore::Vector psi = qcore::Vector::Zero(inner << n);
    for (std::uint64_t w = 0; w < weights.size(); ++w) {
        if (weights[w].weight == 0.0) continue;
        // emitter i has relaxed (|0>) exactly when ancilla i was emitted and collided
        const auto emitters = static_cast<Index>(~w & mask);
        const qcore::Vector phi = history_state(params, t, n, weights[w].alpha, u);
        psi.segment(emitters * inner, inner) = std::sqrt(weights[w].weight) * phi;
    }
    auto labels = qcore::emitter_labels(n);
    const auto rest = system_and_ancillae(n);
    labels.insert(labels.end(), rest.begin(), rest.end());
    return PureStateVector(std::move(labels), std::move(psi));
}

FractionSelection leading_units(std::uint64_t count, Setting setting) {
    FractionSelection s;
    s.setting = setting;
    s.kept.resize(count);
    std::iota(s.kept.begin(), s.kept.end(), std::uint64_t{0});
    return s;
}

FractionSelection sampled_units(std::uint64_t n, std::uint64_t count, Setting setting, std::uint64_t seed) {
    if (count > n) throw DomainError("cannot keep more units than the environment holds");
    std::vector<std::uint64_t> all(n);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    stochastic::CounterRng rng(seed, 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + rng() % (n - i);
        std::swap(all[i], all[j]);
    }
    FractionSelection s;
    s.setting = setting;
    s.kept.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(s.kept.begin(), s.kept.end());
    return s;
}

qcore::LabelList selection_labels(const FractionSelection& selection) {
    qcore::LabelList labels;
    for (std::uint64_t i : selection.kept) {
        if (selection.setting == Setting::WithEmitters) labels.push_back(QubitLabel::emitter(i));
        labels.push_back(QubitLabel::ancilla(i));
    }
    return labels;
}

double mi_bruteforce(const DensityMatrix& state, const FractionSelection& selection) {
    if (selection.setting != Setting::AncillaeOnly) {
        throw LabelError("emitter-pair selections need the pure super-environment state");
    }
    const QubitLabel sys[] = {QubitLabel::system()};
    const auto env = selection_labels(selection);
    auto joint = env;
    joint.push_back(QubitLabel::system());

    const double h_s = qcore::vn_entropy(qcore::partial_trace(state, sys));
    const double h_env = env.empty() ? 0.0 : qcore::vn_entropy(qcore::partial_trace(state, env));
    const double h_joint = qcore::vn_entropy(qcore::partial_trace(state, joint));
    return h_s + h_env - h_joint;
}

double mi_bruteforce(const PureStateVector& state, const FractionSelection& selection) {
    if (selection.setting != Setting::WithEmitters) {
        throw LabelError("ancilla-only selections apply to the mixed ancillae state");
    }
    const auto env = selection_labels(selection);
    for (const auto& l : env) {
        if (std::find(state.labels().begin(), state.labels().end(), l) == state.labels().end()) {
            throw LabelError("selection refers to " + l.str() + ", which is not in the state");
        }
    }
    auto joint = env;
    joint.push_back(QubitLabel::system());
    const double h_s = subset_entropy(state, {QubitLabel::system()});
    return h_s + subset_entropy(state, env) - subset_entropy(state, joint);
}

double cut_entanglement(const PureStateVector& state, std::span<const QubitLabel> part) {
    return qcore::entanglement_entropy(state, part);
}

double cut_entanglement(const DensityMatrix& state, std::span<const QubitLabel> part) {
    if (std::abs(qcore::purity(state) - 1.0) > 1e-10) {
        throw InvalidStateError("cut entanglement is only defined here for pure global states");
    }
    Eigen::SelfAdjointEigenSolver<qcore::Matrix> solver(state.data());
    const Index top = state.dim() - 1;
    qcore::Vector v = solver.eigenvectors().col(top);
    v /= v.norm();
    return qcore::entanglement_entropy(PureStateVector(state.labels(), std::move(v)), part);
}

double max_ancilla_coherence(const DensityMatrix& state) {
    const std::size_t m = state.num_qubits();
    Index sys_mask = 0;
    if (state.contains(QubitLabel::system())) sys_mask = Index{1} << (m - 1 - state.position(QubitLabel::system()));
    const Index dim = state.dim();
    double worst = 0.0;
    for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) {
            if ((r & ~sys_mask) != (c & ~sys_mask)) worst = std::max(worst, std::abs(state.data()(r, c)));
        }
    }
    return worst;
}

} // namespace dynmix::oracle
