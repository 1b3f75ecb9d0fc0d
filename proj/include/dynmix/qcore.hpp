#pragma once

// Dense linear algebra on labeled multi-qubit states.
//
// Tensor-index convention: labels[0] is the most significant factor of the
// computational-basis index. Bit position of labels[i] in a state with m
// qubits is (m - 1 - i). Composite states are always ordered
//   [emitters..., ancillae..., system]
// so the system qubit, when present, is the least significant factor and a
// two-qubit collision state reads rho_a (x) rho_S.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dynmix::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kPsdSlack = 1e-10;

enum class QubitKind { System, Ancilla, Emitter };

struct QubitLabel {
    QubitKind kind = QubitKind::System;
    std::size_t index = 0;

    static constexpr QubitLabel system() { return {QubitKind::System, 0}; }
    static constexpr QubitLabel ancilla(std::size_t i) { return {QubitKind::Ancilla, i}; }
    static constexpr QubitLabel emitter(std::size_t i) { return {QubitKind::Emitter, i}; }

    friend constexpr bool operator==(const QubitLabel&, const QubitLabel&) = default;
    friend constexpr auto operator<=>(const QubitLabel&, const QubitLabel&) = default;

    // "S", "a3", "e0"
    std::string str() const;
};

using LabelList = std::vector<QubitLabel>;

LabelList ancilla_labels(std::size_t n);
LabelList emitter_labels(std::size_t n);

// Hermitian, unit-trace matrix over 2^m basis states. Positivity is checked
// lazily by the spectral operations (vn_entropy, check_positive) since it
// needs a full eigen-decomposition.
class DensityMatrix {
  public:
    DensityMatrix(LabelList labels, Matrix data);

    // The 1x1 state over no qubits; neutral element of tensor().
    static DensityMatrix unit();

    const LabelList& labels() const { return labels_; }
    const Matrix& data() const { return data_; }
    std::size_t num_qubits() const { return labels_.size(); }
    Eigen::Index dim() const { return data_.rows(); }

    // Index of `label` within labels(); throws LabelError when absent.
    std::size_t position(const QubitLabel& label) const;
    bool contains(const QubitLabel& label) const;

    // Throws InvalidStateError if any eigenvalue lies below -kPsdSlack.
    void check_positive() const;

  private:
    LabelList labels_;
    Matrix data_;
};

class PureStateVector {
  public:
    PureStateVector(LabelList labels, Vector amplitudes);

    const LabelList& labels() const { return labels_; }
    const Vector& amplitudes() const { return amplitudes_; }
    std::size_t num_qubits() const { return labels_.size(); }
    Eigen::Index dim() const { return amplitudes_.size(); }

    DensityMatrix to_density() const;

  private:
    LabelList labels_;
    Vector amplitudes_;
};

// Single-qubit building blocks in the computational basis.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Vector2cd ket_zero();
Eigen::Vector2cd ket_one();
Eigen::Vector2cd ket_plus();
Eigen::Vector2cd ket_minus();

DensityMatrix projector(const QubitLabel& label, const Eigen::Vector2cd& ket);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
PureStateVector tensor(const PureStateVector& a, const PureStateVector& b);

// Reduced state on `keep` (treated as a set); labels come out in the
// original relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const QubitLabel> keep);

// Reduced state of a pure vector on `keep` via the amplitude-matrix Gram
// product A A^dagger, without forming the global density matrix.
DensityMatrix partial_trace(const PureStateVector& psi, std::span<const QubitLabel> keep);

// Transposes the tensor factors listed in `part`. The result is Hermitian
// but not necessarily positive, hence a plain matrix.
Matrix partial_transpose(const DensityMatrix& rho, std::span<const QubitLabel> part);

// Ascending eigenvalues of the Hermitian data.
Eigen::VectorXd eigenvalues(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

// Von Neumann entropy in bits.
double vn_entropy(const DensityMatrix& rho);

// Shannon entropy in bits of a probability vector with the 0 log 0 = 0 rule.
double shannon_entropy(std::span<const double> probabilities);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

// Entanglement entropy (bits) of `part` against its complement in a pure
// state. The reduced matrix is formed on the smaller side of the cut.
double entanglement_entropy(const PureStateVector& psi, std::span<const QubitLabel> part);

} // namespace dynmix::qcore
