#include <doctest.h>

#include "canon/canonical.hpp"
#include "canon/haar.hpp"
#include "test_util.hpp"

using namespace canon;
using namespace canon::testutil;

TEST_SUITE_BEGIN("haar");

TEST_CASE("sampled unitaries are unitary and seed-deterministic") {
    HaarSampler sampler(42, 3);
    for (int j = 0; j < 50; ++j) {
        const Matrix u = sampler.sample_unitary();
        CHECK(max_abs(u.adjoint() * u - Matrix::Identity(3, 3)) < 1e-10);
    }
    HaarSampler a(7, 2), b(7, 2);
    for (int j = 0; j < 5; ++j) {
        const Matrix ua = a.sample_unitary(), ub = b.sample_unitary();
        CHECK((ua.array() == ub.array()).all());
    }
    HaarSampler parent(7, 2);
    const Matrix child0 = parent.child(0).sample_unitary();
    const Matrix child1 = parent.child(1).sample_unitary();
    CHECK(max_abs(child0 - child1) > 1e-3);
}

TEST_CASE("second moment") {
    CHECK(max_abs(second_moment(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)) == 0.0);
    Matrix proj = Matrix::Zero(2, 2);
    proj(0, 0) = 1.0;
    CHECK(max_abs(second_moment(proj) - 0.5 * Matrix::Identity(2, 2)) == 0.0);

    // MC cross-check: ∫ U σ_z U† dU = 0 within sampling error.
    HaarSampler sampler(11, 2);
    const MatrixEstimate est = mc_average_matrix(sampler, 20000, [](const Matrix& u) {
        return Matrix(u * pauli_z() * u.adjoint());
    });
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(est.mean(i, j)) < 5.0 * est.std_error(i, j) + 1e-12);
}

TEST_CASE("fourth moment: symmetric subspace vs permutation formula") {
    for (int d : {2, 3}) {
        CHECK(max_abs(pair_average_symmetric(d) - pair_average_permutation(d)) < 1e-12);
    }
    // scalar contraction route agrees too
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    const PairFunctional f = [&](const Matrix& x, const Matrix& y) {
        return (phi_z.apply(x) * phi_z.apply(y)).trace();
    };
    const Complex sym = fourth_moment_contract(f, 2);
    const Complex perm = fourth_moment_contract_permutation(f, 2);
    CHECK(std::abs(sym - perm) < 1e-12);
    // (1/d)·contraction is the avg inner product: 2/(d(d+1))·tr(σ_z²) = 2/3
    CHECK(std::abs(sym / 2.0 - Complex(2.0 / 3.0)) < 1e-12);
}

TEST_CASE("mc_average basics") {
    HaarSampler sampler(5, 2);
    const ScalarEstimate c = mc_average(sampler, 100, [](const Matrix&) {
        return Complex(1.0);
    });
    CHECK(std::abs(c.mean - Complex(1.0)) < 1e-15);
    CHECK(c.std_error < 1e-15);

    // Eq. Lindblad-ham integrand for Φ_{σ_z} averages to σ_z.
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    HaarSampler s2(13, 2);
    const MatrixEstimate est = mc_average_matrix(s2, 20000, [&](const Matrix& u) {
        return Matrix((1.0 / (2.0 * kImag)) *
                      (u.adjoint() * phi_z.apply(u) - phi_z.apply(u.adjoint()) * u));
    });
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(est.mean(i, j) - pauli_z()(i, j)) <
                  5.0 * est.std_error(i, j) + 1e-12);
}

TEST_SUITE_END();
