#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dynmix/params.hpp"
#include "dynmix/qcore.hpp"

namespace dynmix::collision {

using qcore::DensityMatrix;

// exp(-i theta/2 sigma_x (x) sigma_z) in the [ancilla, system] ordering.
Eigen::Matrix4cd collision_unitary(double theta);

struct KrausPair {
    Eigen::Matrix2cd k;
    Eigen::Matrix2cd k_dagger;
};

// K = diag(e^{-i theta/2}, e^{i theta/2}) / sqrt(2), together with K^dagger.
KrausPair kraus_pair(double theta);

// Single-collision channel K rho K^dagger + K^dagger rho K on a one-qubit state.
DensityMatrix collision_channel(const DensityMatrix& rho_s, double theta);

// The same channel evaluated from its dilation: append the ancilla in |0>,
// apply the collision unitary and trace the ancilla out again.
DensityMatrix collision_channel_dilated(const DensityMatrix& rho_s, double theta);

// Joint [ancilla, system] state U_theta (|0> (x) |+>) after one collision.
DensityMatrix single_collision_state(double theta);

// k successive collisions; coherences pick up cos(theta)^k.
DensityMatrix channel_pow(const DensityMatrix& rho_s, double theta, std::uint64_t k);

// exp(-i t H) rho exp(i t H) with H = (omega/2) sigma_z.
DensityMatrix free_evolution(const DensityMatrix& rho_s, double omega, double t);

struct GkslOptions {
    // Upper bound on the fixed RK4 step; the default rule is
    // min(1e-3, 1 / (50 max(lambda, |omega|, 1))).
    double max_step = 0.0;
    // Step-doubling estimate of the one-step error must stay below this.
    double local_error_target = 1e-10;
};

// Right-hand side of the master equation for the infinite reservoir:
// -i[H, rho] + lambda (Phi_c[rho] - rho).
Eigen::Matrix2cd gksl_rhs(const Eigen::Matrix2cd& rho, const ModelParams& params);

// One classical RK4 step of length h.
Eigen::Matrix2cd gksl_step(const Eigen::Matrix2cd& rho, const ModelParams& params, double h);

// Step size actually used by integrate_gksl for these parameters and state.
double gksl_step_size(const DensityMatrix& rho0, const ModelParams& params, const GkslOptions& options = {});

// Fixed-step fourth-order integration from t = 0, reporting the state at
// each time of the strictly increasing grid. The ancilla count in `params`
// is ignored: the master equation describes the infinite reservoir.
std::vector<DensityMatrix> integrate_gksl(const DensityMatrix& rho0, const ModelParams& params,
                                          std::span<const double> t_grid, const GkslOptions& options = {});

} // namespace dynmix::collision
