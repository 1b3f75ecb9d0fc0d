#pragma once

// Exact small-n construction of the system-environment states.
//
// States are built from the model definition alone: for every collision
// history alpha the collision unitaries act on the ancillae that fired, the
// free evolution acts on the system, and histories are mixed (ancillae only)
// or superposed with emitter records (super-environment). No closed-form
// result of dynmix::analytic is used, which is what makes this module a
// ground truth for it.

#include <cstdint>
#include <span>
#include <vector>

#include "dynmix/analytic.hpp"
#include "dynmix/params.hpp"
#include "dynmix/qcore.hpp"

namespace dynmix::oracle {

using analytic::Setting;
using qcore::DensityMatrix;
using qcore::PureStateVector;
using qcore::QubitLabel;

// Dense-dimension guard: the ancillae-only state has dimension 2^(n+1).
inline constexpr std::uint64_t kMaxAncillae = 10;

struct TrajectoryWeight {
    std::vector<std::uint8_t> alpha; // alpha[i] = 1 if ancilla i has collided
    double weight = 0.0;
};

// 1 - e^{-lambda t / n}
double collision_probability(const ModelParams& params, double t);

// All 2^n collision histories with their probabilities, in the same order
// as the ancilla computational basis (ancilla 0 most significant).
std::vector<TrajectoryWeight> trajectory_weights(const ModelParams& params, double t);

// Total probability of histories with an even number of collisions.
double even_parity_mass(std::span<const TrajectoryWeight> weights);

// rho_SE(t) over [a_0 .. a_{n-1}, S] for theta = pi and rho_S(0) = |+><+|.
DensityMatrix build_state_ancillae(const ModelParams& params, double t);

// |psi_SE(t)> over [e_0 .. e_{n-1}, a_0 .. a_{n-1}, S] including the emitters.
PureStateVector build_state_emitters(const ModelParams& params, double t);

struct FractionSelection {
    std::vector<std::uint64_t> kept; // environment unit indices
    Setting setting = Setting::AncillaeOnly;
};

// Keeps units {0, ..., count - 1}.
FractionSelection leading_units(std::uint64_t count, Setting setting);

// Keeps `count` of the n units, drawn uniformly from the given seed.
FractionSelection sampled_units(std::uint64_t n, std::uint64_t count, Setting setting, std::uint64_t seed);

// Labels carried by the selected units: ancillae, or emitter-ancilla pairs.
qcore::LabelList selection_labels(const FractionSelection& selection);

// I_f = H_S + H_Ef - H_SEf from reduced states; AncillaeOnly selections only.
double mi_bruteforce(const DensityMatrix& state, const FractionSelection& selection);

// Same for the pure super-environment state; WithEmitters selections only.
// Entropies are taken on the smaller side of each cut.
double mi_bruteforce(const PureStateVector& state, const FractionSelection& selection);

// Entanglement entropy of `part` against the rest of a pure state.
double cut_entanglement(const PureStateVector& state, std::span<const QubitLabel> part);
// Accepts a density matrix only if it is pure (purity 1 within 1e-10).
double cut_entanglement(const DensityMatrix& state, std::span<const QubitLabel> part);

// Largest |element| coupling two different ancilla basis configurations.
// Zero means the state is classical on the ancillae, hence separable
// across every cut.
double max_ancilla_coherence(const DensityMatrix& state);

} // namespace dynmix::oracle
