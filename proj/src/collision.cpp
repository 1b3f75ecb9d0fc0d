#include "dynmix/collision.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "dynmix/error.hpp"

namespace dynmix::collision {

namespace {

using qcore::Complex;
using qcore::QubitLabel;

void require_single_qubit(const DensityMatrix& rho, const char* what) {
    if (rho.num_qubits() != 1) {
        throw DomainError(std::string(what) + " acts on a single qubit, got " + std::to_string(rho.num_qubits()));
    }
}

DensityMatrix with_data(const DensityMatrix& like, const Eigen::Matrix2cd& m) {
    return DensityMatrix(like.labels(), qcore::Matrix(m));
}

void check_state(const Eigen::Matrix2cd& m, double t) {
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const double tr = std::abs(m.trace() - Complex(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(herm <= qcore::kHermitianTol) || !(tr <= qcore::kTraceTol) || !(lo >= -qcore::kPsdSlack)) {
        throw IntegrationError("GKSL integration left the state space at t = " + std::to_string(t));
    }
}

} // namespace

Eigen::Matrix4cd collision_unitary(double theta) {
    const Eigen::Matrix2cd sx = qcore::pauli_x();
    const Eigen::Matrix2cd sz = qcore::pauli_z();
    Eigen::Matrix4cd xz;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) xz.block<2, 2>(2 * i, 2 * j) = sx(i, j) * sz;
    }
    // (sigma_x (x) sigma_z)^2 = I, so the exponential is exact in closed form
    return std::cos(theta / 2) * Eigen::Matrix4cd::Identity() - Complex(0.0, std::sin(theta / 2)) * xz;
}

KrausPair kraus_pair(double theta) {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd k = Eigen::Matrix2cd::Zero();
    k(0, 0) = s * std::polar(1.0, -theta / 2);
    k(1, 1) = s * std::polar(1.0, theta / 2);
    return {k, k.adjoint()};
}

DensityMatrix collision_channel(const DensityMatrix& rho_s, double theta) {
    require_single_qubit(rho_s, "collision_channel");
    const auto [k, kd] = kraus_pair(theta);
    const Eigen::Matrix2cd rho = rho_s.data();
    const Eigen::Matrix2cd out = k * rho * kd + kd * rho * k;
    return with_data(rho_s, out);
}

DensityMatrix collision_channel_dilated(const DensityMatrix& rho_s, double theta) {
    require_single_qubit(rho_s, "collision_channel");
    // A label distinct from the system's own, so composition stays valid
    const QubitLabel sys = rho_s.labels().front();
    const QubitLabel anc = sys == QubitLabel::ancilla(0) ? QubitLabel::ancilla(1) : QubitLabel::ancilla(0);
    const DensityMatrix joint = qcore::tensor(qcore::projector(anc, qcore::ket_zero()), rho_s);
    const Eigen::Matrix4cd u = collision_unitary(theta);
    const Eigen::Matrix4cd evolved = u * joint.data() * u.adjoint();
    const DensityMatrix after(joint.labels(), qcore::Matrix((evolved + evolved.adjoint()) * 0.5));
    const QubitLabel keep[] = {sys};
    return qcore::partial_trace(after, keep);
}

DensityMatrix single_collision_state(double theta) {
    Eigen::Vector4cd in;
    in << qcore::ket_plus(), Eigen::Vector2cd::Zero(); // |0>_a (x) |+>_S
    const Eigen::Vector4cd out = collision_unitary(theta) * in;
    return qcore::PureStateVector({QubitLabel::ancilla(0), QubitLabel::system()}, out).to_density();
}

DensityMatrix channel_pow(const DensityMatrix& rho_s, double theta, std::uint64_t k) {
    require_single_qubit(rho_s, "channel_pow");
    Eigen::Matrix2cd m = rho_s.data();
    const double factor = std::pow(std::cos(theta), static_cast<double>(k));
    m(0, 1) *= factor;
    m(1, 0) *= factor;
    return with_data(rho_s, m);
}

DensityMatrix free_evolution(const DensityMatrix& rho_s, double omega, double t) {
    require_single_qubit(rho_s, "free_evolution");
    Eigen::Matrix2cd m = rho_s.data();
    const Complex phase = std::polar(1.0, -omega * t);
    m(0, 1) *= phase;
    m(1, 0) *= std::conj(phase);
    return with_data(rho_s, m);
}

Eigen::Matrix2cd gksl_rhs(const Eigen::Matrix2cd& rho, const ModelParams& params) {
    const Eigen::Matrix2cd h = 0.5 * params.omega() * qcore::pauli_z();
    const auto [k, kd] = kraus_pair(params.theta());
    const Eigen::Matrix2cd commutator = h * rho - rho * h;
    const Eigen::Matrix2cd channel = k * rho * kd + kd * rho * k;
    return Complex(0.0, -1.0) * commutator + params.lambda() * (channel - rho);
}

Eigen::Matrix2cd gksl_step(const Eigen::Matrix2cd& rho, const ModelParams& params, double h) {
    const Eigen::Matrix2cd k1 = gksl_rhs(rho, params);
    const Eigen::Matrix2cd k2 = gksl_rhs(rho + 0.5 * h * k1, params);
    const Eigen::Matrix2cd k3 = gksl_rhs(rho + 0.5 * h * k2, params);
    const Eigen::Matrix2cd k4 = gksl_rhs(rho + h * k3, params);
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double gksl_step_size(const DensityMatrix& rho0, const ModelParams& params, const GkslOptions& options) {
    double h = options.max_step > 0.0
                   ? options.max_step
                   : std::min(1e-3, 1.0 / (50.0 * std::max({params.lambda(), std::abs(params.omega()), 1.0})));
    const Eigen::Matrix2cd rho = rho0.data();
    for (int attempt = 0; attempt < 30; ++attempt) {
        const Eigen::Matrix2cd full = gksl_step(rho, params, h);
        const Eigen::Matrix2cd half = gksl_step(gksl_step(rho, params, 0.5 * h), params, 0.5 * h);
        if ((full - half).cwiseAbs().maxCoeff() < options.local_error_target) return h;
        h *= 0.5;
    }
    throw IntegrationError("could not reach the local error target for the GKSL step");
}

std::vector<DensityMatrix> integrate_gksl(const DensityMatrix& rho0, const ModelParams& params,
                                          std::span<const double> t_grid, const GkslOptions& options) {
    require_single_qubit(rho0, "integrate_gksl");
    if (t_grid.empty()) return {};
    if (!(t_grid.front() >= 0.0)) throw DomainError("time grid must start at t >= 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    }

    const double h_max = gksl_step_size(rho0, params, options);
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    Eigen::Matrix2cd rho = rho0.data();
    double t = 0.0;
    for (double target : t_grid) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / h_max));
            const double h = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) rho = gksl_step(rho, params, h);
        }
        t = target;
        check_state(rho, t);
        out.push_back(with_data(rho0, rho));
    }
    return out;
}

} // namespace dynmix::collision
