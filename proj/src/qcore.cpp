#include "dynmix/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dynmix/error.hpp"

namespace dynmix::qcore {

namespace {

using Index = Eigen::Index;

bool is_power_of_two_dim(Index dim, std::size_t qubits) {
    return qubits < 63 && dim == (Index{1} << qubits);
}

void check_unique(const LabelList& labels) {
    std::set<QubitLabel> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) throw LabelError("duplicate qubit label " + l.str());
    }
}

// Splits every basis index of an m-qubit register into (kept, rest) indices
// and back. compose[kept * rest_dim + rest] is the full index.
struct IndexSplit {
    Index keep_dim = 1;
    Index rest_dim = 1;
    std::vector<Index> compose;
};

IndexSplit split_indices(const LabelList& labels, std::span<const QubitLabel> keep) {
    const std::size_t m = labels.size();
    std::vector<bool> kept(m, false);
    std::set<QubitLabel> requested;
    for (const auto& l : keep) {
        if (!requested.insert(l).second) throw LabelError("duplicate label in selection: " + l.str());
        auto it = std::find(labels.begin(), labels.end(), l);
        if (it == labels.end()) throw LabelError("label not present in state: " + l.str());
        kept[static_cast<std::size_t>(it - labels.begin())] = true;
    }

    std::vector<int> keep_bits, rest_bits; // bit positions, most significant first
    for (std::size_t i = 0; i < m; ++i) {
        const int bit = static_cast<int>(m - 1 - i);
        (kept[i] ? keep_bits : rest_bits).push_back(bit);
    }

    IndexSplit s;
    s.keep_dim = Index{1} << keep_bits.size();
    s.rest_dim = Index{1} << rest_bits.size();
    s.compose.resize(static_cast<std::size_t>(s.keep_dim * s.rest_dim));
    auto scatter = [](Index value, const std::vector<int>& bits) {
        Index out = 0;
        const std::size_t w = bits.size();
        for (std::size_t j = 0; j < w; ++j) {
            if ((value >> (w - 1 - j)) & 1) out |= Index{1} << bits[j];
        }
        return out;
    };
    std::vector<Index> rest_part(static_cast<std::size_t>(s.rest_dim));
    for (Index r = 0; r < s.rest_dim; ++r) rest_part[static_cast<std::size_t>(r)] = scatter(r, rest_bits);
    for (Index k = 0; k < s.keep_dim; ++k) {
        const Index kp = scatter(k, keep_bits);
        for (Index r = 0; r < s.rest_dim; ++r) {
            s.compose[static_cast<std::size_t>(k * s.rest_dim + r)] = kp | rest_part[static_cast<std::size_t>(r)];
        }
    }
    return s;
}

LabelList select_labels(const LabelList& labels, std::span<const QubitLabel> keep) {
    LabelList out;
    for (const auto& l : labels) {
        if (std::find(keep.begin(), keep.end(), l) != keep.end()) out.push_back(l);
    }
    return out;
}

LabelList complement_labels(const LabelList& labels, std::span<const QubitLabel> part) {
    LabelList out;
    for (const auto& l : labels) {
        if (std::find(part.begin(), part.end(), l) == part.end()) out.push_back(l);
    }
    return out;
}

Matrix hermitize(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

} // namespace

std::string QubitLabel::str() const {
    switch (kind) {
    case QubitKind::System: return "S";
    case QubitKind::Ancilla: return "a" + std::to_string(index);
    case QubitKind::Emitter: return "e" + std::to_string(index);
    }
    return "?";
}

LabelList ancilla_labels(std::size_t n) {
    LabelList out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(QubitLabel::ancilla(i));
    return out;
}

LabelList emitter_labels(std::size_t n) {
    LabelList out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(QubitLabel::emitter(i));
    return out;
}

DensityMatrix::DensityMatrix(LabelList labels, Matrix data) : labels_(std::move(labels)), data_(std::move(data)) {
    check_unique(labels_);
    if (data_.rows() != data_.cols() || !is_power_of_two_dim(data_.rows(), labels_.size())) {
        std::ostringstream msg;
        msg << "density matrix of shape " << data_.rows() << "x" << data_.cols() << " does not match "
            << labels_.size() << " qubit labels";
        throw InvalidStateError(msg.str());
    }
    const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= kHermitianTol)) throw InvalidStateError("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
    const double tr_err = std::abs(data_.trace() - Complex(1.0, 0.0));
    if (!(tr_err <= kTraceTol)) throw InvalidStateError("density matrix trace deviates from 1 by " + std::to_string(tr_err));
}

DensityMatrix DensityMatrix::unit() { return DensityMatrix({}, Matrix::Ones(1, 1)); }

std::size_t DensityMatrix::position(const QubitLabel& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw LabelError("label not present in state: " + label.str());
    return static_cast<std::size_t>(it - labels_.begin());
}

bool DensityMatrix::contains(const QubitLabel& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

void DensityMatrix::check_positive() const {
    const double lo = eigenvalues(*this).minCoeff();
    if (lo < -kPsdSlack) throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(lo));
}

PureStateVector::PureStateVector(LabelList labels, Vector amplitudes)
    : labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
    check_unique(labels_);
    if (!is_power_of_two_dim(amplitudes_.size(), labels_.size())) {
        throw InvalidStateError("state vector length does not match its qubit labels");
    }
    const double norm_err = std::abs(amplitudes_.norm() - 1.0);
    if (!(norm_err <= kNormTol)) throw InvalidStateError("state vector norm deviates from 1 by " + std::to_string(norm_err));
}

DensityMatrix PureStateVector::to_density() const {
    return DensityMatrix(labels_, amplitudes_ * amplitudes_.adjoint());
}

Eigen::Matrix2cd pauli_x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}

Eigen::Matrix2cd pauli_y() {
    Eigen::Matrix2cd m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Eigen::Matrix2cd pauli_z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Vector2cd ket_zero() { return Eigen::Vector2cd(1, 0); }
Eigen::Vector2cd ket_one() { return Eigen::Vector2cd(0, 1); }
Eigen::Vector2cd ket_plus() { return Eigen::Vector2cd(1, 1) / std::sqrt(2.0); }
Eigen::Vector2cd ket_minus() { return Eigen::Vector2cd(1, -1) / std::sqrt(2.0); }

DensityMatrix projector(const QubitLabel& label, const Eigen::Vector2cd& ket) {
    const Eigen::Vector2cd k = ket / ket.norm();
    return DensityMatrix({label}, k * k.adjoint());
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    for (const auto& l : b.labels()) {
        if (a.contains(l)) throw CompositionError("cannot compose states sharing label " + l.str());
    }
    LabelList labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    const Index da = a.dim(), db = b.dim();
    Matrix out(da * db, da * db);
    for (Index i = 0; i < da; ++i) {
        for (Index j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a.data()(i, j) * b.data();
    }
    return DensityMatrix(std::move(labels), std::move(out));
}

PureStateVector tensor(const PureStateVector& a, const PureStateVector& b) {
    for (const auto& l : b.labels()) {
        if (std::find(a.labels().begin(), a.labels().end(), l) != a.labels().end()) {
            throw CompositionError("cannot compose states sharing label " + l.str());
        }
    }
    LabelList labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    const Index db = b.dim();
    Vector out(a.dim() * db);
    for (Index i = 0; i < a.dim(); ++i) out.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
    return PureStateVector(std::move(labels), std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const QubitLabel> keep) {
    if (keep.empty()) throw LabelError("partial_trace needs a non-empty set of kept labels; use the trace instead");
    const IndexSplit s = split_indices(rho.labels(), keep);
    const auto& d = rho.data();
    Matrix out = Matrix::Zero(s.keep_dim, s.keep_dim);
    for (Index a = 0; a < s.keep_dim; ++a) {
        const Index* row = &s.compose[static_cast<std::size_t>(a * s.rest_dim)];
        for (Index b = 0; b < s.keep_dim; ++b) {
            const Index* col = &s.compose[static_cast<std::size_t>(b * s.rest_dim)];
            Complex acc = 0.0;
            for (Index r = 0; r < s.rest_dim; ++r) acc += d(row[r], col[r]);
            out(a, b) = acc;
        }
    }
    return DensityMatrix(select_labels(rho.labels(), keep), hermitize(out));
}

DensityMatrix partial_trace(const PureStateVector& psi, std::span<const QubitLabel> keep) {
    if (keep.empty()) throw LabelError("partial_trace needs a non-empty set of kept labels; use the trace instead");
    const IndexSplit s = split_indices(psi.labels(), keep);
    Matrix amp(s.keep_dim, s.rest_dim);
    for (Index k = 0; k < s.keep_dim; ++k) {
        for (Index r = 0; r < s.rest_dim; ++r) {
            amp(k, r) = psi.amplitudes()(s.compose[static_cast<std::size_t>(k * s.rest_dim + r)]);
        }
    }
    Matrix gram = Matrix::Zero(s.keep_dim, s.keep_dim);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(amp);
    Matrix full = gram.selfadjointView<Eigen::Lower>();
    return DensityMatrix(select_labels(psi.labels(), keep), hermitize(full));
}

Matrix partial_transpose(const DensityMatrix& rho, std::span<const QubitLabel> part) {
    const std::size_t m = rho.num_qubits();
    Index mask = 0;
    for (const auto& l : part) mask |= Index{1} << (m - 1 - rho.position(l));
    const Index dim = rho.dim();
    Matrix out(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            // swap the bits of i and j that belong to `part`
            const Index ii = (i & ~mask) | (j & mask);
            const Index jj = (j & ~mask) | (i & mask);
            out(ii, jj) = rho.data()(i, j);
        }
    }
    return out;
}

Eigen::VectorXd eigenvalues(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.data(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw InvalidStateError("eigen-decomposition failed");
    return solver.eigenvalues();
}

double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return rho.data().squaredNorm();
}

double shannon_entropy(std::span<const double> probabilities) {
    double h = 0.0;
    for (double p : probabilities) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double vn_entropy(const DensityMatrix& rho) {
    const Eigen::VectorXd ev = eigenvalues(rho);
    std::vector<double> p(static_cast<std::size_t>(ev.size()));
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -kPsdSlack) throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(ev(i)));
        p[static_cast<std::size_t>(i)] = std::max(ev(i), 0.0);
    }
    const double h = shannon_entropy(p);
    return std::clamp(h, 0.0, static_cast<double>(rho.num_qubits()));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.labels() != b.labels()) throw LabelError("trace_distance requires identical label lists");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(a.data() - b.data()), Eigen::EigenvaluesOnly);
    return std::min(0.5 * solver.eigenvalues().cwiseAbs().sum(), 1.0);
}

double concurrence(const DensityMatrix& rho) {
    if (rho.num_qubits() != 2) throw DomainError("concurrence needs a two-qubit state, got dimension " + std::to_string(rho.dim()));
    // rho = W W^dagger with W = V sqrt(P). The square roots of the
    // eigenvalues of rho * (Y rho^* Y) are the singular values of the
    // symmetric matrix W^T Y W, which avoids square roots of tiny
    // eigenvalues amplifying round-off for (nearly) pure states.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.data());
    if (solver.info() != Eigen::Success) throw InvalidStateError("eigen-decomposition failed");
    Eigen::VectorXd w = solver.eigenvalues();
    for (Index i = 0; i < w.size(); ++i) {
        if (w(i) < -kPsdSlack) throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(w(i)));
        w(i) = std::sqrt(std::max(w(i), 0.0));
    }
    const Matrix weighted = solver.eigenvectors() * w.asDiagonal();
    Matrix yy = Matrix::Zero(4, 4);
    yy(0, 3) = -1;
    yy(1, 2) = 1;
    yy(2, 1) = 1;
    yy(3, 0) = -1;
    const Matrix t = weighted.transpose() * yy * weighted;
    Eigen::JacobiSVD<Matrix> svd(t);
    const Eigen::VectorXd sv = svd.singularValues(); // descending
    const double c = sv(0) - sv(1) - sv(2) - sv(3);
    return std::clamp(c, 0.0, 1.0);
}

double entanglement_entropy(const PureStateVector& psi, std::span<const QubitLabel> part) {
    if (part.empty() || part.size() >= psi.num_qubits()) {
        throw LabelError("entanglement cut needs a proper non-empty subset of the labels");
    }
    const LabelList own = select_labels(psi.labels(), part);
    if (own.size() != part.size()) throw LabelError("cut contains labels absent from the state or duplicates");
    const LabelList other = complement_labels(psi.labels(), part);
    const LabelList& smaller = own.size() <= other.size() ? own : other;
    return vn_entropy(partial_trace(psi, smaller));
}

} // namespace dynmix::qcore
