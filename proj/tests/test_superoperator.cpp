#include <doctest.h>

#include "canon/superoperator.hpp"
#include "test_util.hpp"

using namespace canon;
using namespace canon::testutil;

TEST_SUITE_BEGIN("superoperator");

TEST_CASE("from_hamiltonian") {
    CHECK(max_abs(Superoperator::from_hamiltonian(HermitianOperator(Matrix::Zero(2, 2)))
                      .rep()) == 0.0);
    const Superoperator s = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    std::mt19937_64 rng(1);
    const Matrix m = random_complex(rng, 2);
    CHECK(max_abs(s.apply(m) - (-kImag) * (pauli_z() * m - m * pauli_z())) < 1e-14);
}

TEST_CASE("from_lindblad pauli depolarizer") {
    std::vector<std::pair<double, Matrix>> terms = {
        {1.0, pauli_x()}, {1.0, pauli_y()}, {1.0, pauli_z()}};
    const Superoperator s =
        Superoperator::from_lindblad(HermitianOperator(Matrix::Zero(2, 2)), terms);
    CHECK(max_abs(s.apply(pauli_z()) + 4.0 * pauli_z()) < 1e-13);
    CHECK(max_abs(s.apply(Matrix::Identity(2, 2))) < 1e-13);
}

TEST_CASE("choi matrices") {
    // identity map → unnormalized maximally entangled projector
    for (int d : {2, 3}) {
        Vector phi = Vector::Zero(d * d);
        for (int a = 0; a < d; ++a) phi[a * d + a] = 1.0;
        CHECK(max_abs(Superoperator::identity(d).choi() - Matrix(phi * phi.adjoint())) <
              1e-14);
        // completely depolarizing channel → I/d
        const Superoperator dep = Superoperator::from_action(d, [d](const Matrix& m) {
            return Matrix(m.trace() / double(d) * Matrix::Identity(d, d));
        });
        CHECK(max_abs(dep.choi() - Matrix::Identity(d * d, d * d) / double(d)) < 1e-14);
        // reshuffle round trip
        std::mt19937_64 rng(d);
        const Superoperator s(d, random_complex(rng, d * d));
        CHECK(max_abs(Superoperator::from_choi(s.choi()).rep() - s.rep()) < 1e-13);
    }
}

TEST_CASE("adjoint and composition") {
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    CHECK(max_abs(phi_z.adjoint().rep() + phi_z.rep()) < 1e-14);
    // ⟨A, L(B)⟩_HS = ⟨L*(A), B⟩_HS on random operators
    std::mt19937_64 rng(9);
    const Superoperator s(3, random_complex(rng, 9));
    const Matrix a = random_complex(rng, 3), b = random_complex(rng, 3);
    const Complex lhs = (a.adjoint() * s.apply(b)).trace();
    const Complex rhs = (s.adjoint().apply(a).adjoint() * b).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(max_abs(s.compose(s).apply(a) - s.apply(s.apply(a))) < 1e-12);
}

TEST_CASE("hpta checks") {
    CHECK_FALSE(is_hpta(Superoperator::identity(2), 1e-10));
    const Superoperator proj = Superoperator::from_action(2, [](const Matrix& m) {
        return Matrix(m.trace() / 2.0 * Matrix::Identity(2, 2) - m);
    });
    CHECK(is_hpta(proj, 1e-10));
    std::mt19937_64 rng(2);
    CHECK(is_hpta(random_hpta(rng, 3, 4), 1e-10));
    const HptaDiagnostics diag = check_hpta(Superoperator::identity(2), 1e-10);
    CHECK(diag.hermiticity_residual < 1e-14);
    CHECK(diag.trace_residual > 0.1);
}

TEST_CASE("pseudo-Kraus decomposition") {
    CHECK(pseudo_kraus(Superoperator::zero(3)).weights.empty());

    const Superoperator conj_x = Superoperator::from_action(
        2, [](const Matrix& m) { return Matrix(pauli_x() * m * pauli_x()); });
    const PseudoKrausDecomposition pk = pseudo_kraus(conj_x);
    REQUIRE(pk.weights.size() == 1);
    CHECK(pk.weights[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(pk.operators[0].norm() - 1.0) < 1e-12);
    CHECK(max_abs(pk.reconstruct().rep() - conj_x.rep()) < 1e-12);

    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    const PseudoKrausDecomposition pk_z = pseudo_kraus(phi_z);
    REQUIRE(pk_z.weights.size() == 2);
    std::vector<double> w = pk_z.weights;
    std::sort(w.begin(), w.end());
    CHECK(std::abs(w[0] + 2.0) < 1e-12);
    CHECK(std::abs(w[1] - 2.0) < 1e-12);
    CHECK(max_abs(pk_z.reconstruct().rep() - phi_z.rep()) < 1e-12);

    std::mt19937_64 rng(4);
    const Superoperator s = random_hpta(rng, 3, 5);
    CHECK(max_abs(pseudo_kraus(s).reconstruct().rep() - s.rep()) < 1e-11);
}

TEST_CASE("from_action matches from_lindblad") {
    std::mt19937_64 rng(6);
    const HermitianOperator h(random_hermitian(rng, 2));
    const Matrix l = random_complex(rng, 2);
    const Superoperator a = Superoperator::from_lindblad(h, {{0.7, l}});
    const Superoperator b = Superoperator::from_action(2, [&](const Matrix& m) {
        return Matrix(-kImag * (h.matrix() * m - m * h.matrix()) +
                      0.7 * (l * m * l.adjoint() - 0.5 * (l.adjoint() * l * m).eval() -
                             0.5 * (m * l.adjoint() * l).eval()));
    });
    CHECK(max_abs(a.rep() - b.rep()) < 1e-13);
}

TEST_SUITE_END();
