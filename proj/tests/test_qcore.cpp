#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dynmix/error.hpp"
#include "dynmix/qcore.hpp"

using namespace dynmix;
using namespace dynmix::qcore;

namespace {

const QubitLabel S = QubitLabel::system();
const QubitLabel A0 = QubitLabel::ancilla(0);
const QubitLabel A1 = QubitLabel::ancilla(1);

Matrix random_density(int dim, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    Matrix x(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) = Complex(g(gen), g(gen));
    Matrix rho = x * x.adjoint();
    rho /= rho.trace().real();
    return (rho + rho.adjoint()) * 0.5;
}

Vector random_pure(int dim, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(g(gen), g(gen));
    return v.normalized();
}

PureStateVector bell() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return PureStateVector({A0, S}, v);
}

} // namespace

TEST_CASE("density matrix validation") {
    CHECK_NOTHROW(projector(S, ket_plus()));
    Matrix bad = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix({S}, bad), InvalidStateError); // trace 2
    Matrix nonherm = Matrix::Identity(2, 2) * 0.5;
    nonherm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix({S}, nonherm), InvalidStateError);
    CHECK_THROWS_AS(DensityMatrix({S, S}, Matrix::Identity(4, 4) * 0.25), LabelError);
    CHECK_THROWS(DensityMatrix({S}, Matrix::Identity(4, 4) * 0.25));
    Vector v = Vector::Ones(2);
    CHECK_THROWS_AS(PureStateVector({S}, v), InvalidStateError);
}

TEST_CASE("label strings and ordering") {
    CHECK(S.str() == "S");
    CHECK(QubitLabel::ancilla(3).str() == "a3");
    CHECK(QubitLabel::emitter(0).str() == "e0");
    CHECK(ancilla_labels(3).size() == 3);
    CHECK(emitter_labels(2)[1] == QubitLabel::emitter(1));
}

TEST_CASE("tensor rejects overlapping labels") {
    const auto a = projector(S, ket_zero());
    CHECK_THROWS_AS(tensor(a, a), CompositionError);
    const auto ab = tensor(projector(A0, ket_one()), a);
    CHECK(ab.labels() == LabelList{A0, S});
    // |1>|0> has its weight on index 2 with the first label most significant
    CHECK(std::abs(ab.data()(2, 2) - 1.0) < 1e-15);
}

TEST_CASE("partial trace of a product state returns the factors") {
    std::mt19937_64 gen(11);
    const DensityMatrix a({A0}, random_density(2, gen));
    const DensityMatrix b({A1, S}, random_density(4, gen));
    const auto ab = tensor(a, b);
    const QubitLabel keep_a[] = {A0};
    const QubitLabel keep_b[] = {S, A1};
    CHECK((partial_trace(ab, keep_a).data() - a.data()).norm() < 1e-14);
    const auto rb = partial_trace(ab, keep_b);
    CHECK(rb.labels() == LabelList{A1, S});
    CHECK((rb.data() - b.data()).norm() < 1e-14);
}

TEST_CASE("partial trace errors") {
    const auto rho = tensor(projector(A0, ket_zero()), projector(S, ket_zero()));
    CHECK_THROWS_AS(partial_trace(rho, std::span<const QubitLabel>{}), LabelError);
    const QubitLabel missing[] = {A1};
    CHECK_THROWS_AS(partial_trace(rho, missing), LabelError);
    CHECK_THROWS_AS(rho.position(A1), LabelError);
}

TEST_CASE("property: pure-state and density partial traces agree") {
    std::mt19937_64 gen(5);
    const LabelList labels = {QubitLabel::emitter(0), A0, A1, S};
    for (int trial = 0; trial < 20; ++trial) {
        const PureStateVector psi(labels, random_pure(16, gen));
        const auto rho = psi.to_density();
        std::vector<QubitLabel> keep;
        for (const auto& l : labels)
            if (gen() & 1) keep.push_back(l);
        if (keep.empty()) keep.push_back(S);
        const auto x = partial_trace(psi, keep);
        const auto y = partial_trace(rho, keep);
        CHECK(x.labels() == y.labels());
        CHECK((x.data() - y.data()).norm() < 1e-13);
    }
}

TEST_CASE("property: trace and hermiticity survive partial trace") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho({A0, A1, S}, random_density(8, gen));
        const QubitLabel keep[] = {A1};
        const auto r = partial_trace(rho, keep);
        CHECK(std::abs(r.data().trace() - 1.0) < 1e-13);
        CHECK((r.data() - r.data().adjoint()).norm() < 1e-14);
        CHECK_NOTHROW(r.check_positive());
    }
}

TEST_CASE("entropy and purity anchors") {
    CHECK(vn_entropy(projector(S, ket_plus())) == doctest::Approx(0.0).epsilon(1e-12));
    const DensityMatrix mixed({S}, Matrix::Identity(2, 2) * 0.5);
    CHECK(vn_entropy(mixed) == doctest::Approx(1.0));
    CHECK(purity(mixed) == doctest::Approx(0.5));
    const auto b = bell().to_density();
    CHECK(purity(b) == doctest::Approx(1.0));
    const QubitLabel keep[] = {S};
    CHECK(vn_entropy(partial_trace(b, keep)) == doctest::Approx(1.0));
    const double p[] = {0.25, 0.25, 0.5, 0.0};
    CHECK(shannon_entropy(p) == doctest::Approx(1.5));
}

TEST_CASE("property: entropy bounds and subadditivity") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho({A0, S}, random_density(4, gen));
        const double h = vn_entropy(rho);
        CHECK(h >= 0.0);
        CHECK(h <= 2.0 + 1e-12);
        const QubitLabel ka[] = {A0};
        const QubitLabel ks[] = {S};
        CHECK(h <= vn_entropy(partial_trace(rho, ka)) + vn_entropy(partial_trace(rho, ks)) + 1e-10);
    }
}

TEST_CASE("trace distance") {
    const auto z0 = projector(S, ket_zero());
    const auto z1 = projector(S, ket_one());
    CHECK(trace_distance(z0, z1) == doctest::Approx(1.0));
    CHECK(trace_distance(z0, z0) == doctest::Approx(0.0));
    CHECK(trace_distance(projector(S, ket_plus()), z0) == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(trace_distance(z0, projector(A0, ket_zero())), LabelError);
}

TEST_CASE("concurrence anchors") {
    CHECK(concurrence(bell().to_density()) == doctest::Approx(1.0).epsilon(1e-12));
    const auto prod = tensor(projector(A0, ket_plus()), projector(S, ket_zero()));
    CHECK(concurrence(prod) == doctest::Approx(0.0).epsilon(1e-12));
    // Werner state p|bell><bell| + (1-p) I/4 has C = max(0, (3p - 1) / 2)
    for (double p : {0.2, 1.0 / 3.0, 0.5, 0.8}) {
        const Matrix w = p * bell().to_density().data() + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
        CHECK(concurrence(DensityMatrix({A0, S}, w)) ==
              doctest::Approx(std::max(0.0, (3.0 * p - 1.0) / 2.0)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(concurrence(projector(S, ket_zero())), DomainError);
}

TEST_CASE("property: pure-state concurrence equals 2|det| of the amplitude matrix") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Vector v = random_pure(4, gen);
        const double expected = 2.0 * std::abs(v(0) * v(3) - v(1) * v(2));
        CHECK(concurrence(PureStateVector({A0, S}, v).to_density()) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("partial transpose of a Bell state has a negative eigenvalue") {
    const QubitLabel part[] = {S};
    const Matrix pt = partial_transpose(bell().to_density(), part);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-0.5));
}

TEST_CASE("entanglement entropy of pure states") {
    const QubitLabel part[] = {S};
    CHECK(entanglement_entropy(bell(), part) == doctest::Approx(1.0));
    std::mt19937_64 gen(8);
    const LabelList labels = {A0, A1, S};
    const PureStateVector psi(labels, random_pure(8, gen));
    const QubitLabel one[] = {S};
    const QubitLabel two[] = {A0, A1};
    CHECK(entanglement_entropy(psi, one) == doctest::Approx(entanglement_entropy(psi, two)).epsilon(1e-10));
    const QubitLabel all[] = {A0, A1, S};
    CHECK_THROWS(entanglement_entropy(psi, all));
}
