#include <doctest.h>

#include "canon/canonical.hpp"
#include "test_util.hpp"

using namespace canon;
using namespace canon::testutil;

namespace {

// Independent oracle for ⟨M,N⟩_avg via the explicit four-permutation Haar
// formula: (1/d)·avg_φ tr[M(|φ⟩⟨φ|) N(|φ⟩⟨φ|)].
double avg_ip_permutation_oracle(const Superoperator& m, const Superoperator& n) {
    const PairFunctional f = [&](const Matrix& x, const Matrix& y) {
        return (m.apply(x) * n.apply(y)).trace();
    };
    return (fourth_moment_contract_permutation(f, m.dim()) / double(m.dim())).real();
}

// Minimize ‖s − Φ_G‖²_avg over the traceless Hermitian basis by normal
// equations; returns the minimizing Hamiltonian.
HermitianOperator normal_equations_oracle(const Superoperator& s) {
    const int d = s.dim();
    const TracelessHermitianBasis basis = traceless_basis(d);
    const int n = static_cast<int>(basis.elements.size());
    RealMatrix gram(n, n);
    Eigen::VectorXd rhs(n);
    std::vector<Superoperator> phi;
    phi.reserve(n);
    for (const Matrix& b : basis.elements) {
        phi.push_back(Superoperator::from_hamiltonian(HermitianOperator(b)));
    }
    for (int j = 0; j < n; ++j) {
        rhs[j] = avg_inner_product(phi[j], s);
        for (int k = 0; k < n; ++k) gram(j, k) = avg_inner_product(phi[j], phi[k]);
    }
    const Eigen::VectorXd c = gram.ldlt().solve(rhs);
    Matrix h = Matrix::Zero(d, d);
    for (int j = 0; j < n; ++j) h += c[j] * basis.elements[j];
    return HermitianOperator(h, 1e-9);
}

}  // namespace

TEST_SUITE_BEGIN("canonical");

TEST_CASE("avg inner product closed form") {
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    const Superoperator phi_x = Superoperator::from_hamiltonian(HermitianOperator(pauli_x()));
    CHECK(avg_inner_product(phi_z, phi_z) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(avg_inner_product(phi_z, phi_x)) < 1e-14);
    CHECK(avg_inner_product(Superoperator::zero(2), phi_z) == 0.0);
    CHECK(std::abs(avg_norm_squared(Superoperator::identity(3) -
                                    Superoperator::identity(3))) == 0.0);

    // permutation-formula oracle on random HPTA pairs
    std::mt19937_64 rng(21);
    for (int d : {2, 3}) {
        const Superoperator m = random_hpta(rng, d, 2), n = random_hpta(rng, d, 2);
        CHECK(avg_inner_product(m, n) ==
              doctest::Approx(avg_ip_permutation_oracle(m, n)).epsilon(1e-10));
    }
}

TEST_CASE("HS and Choi-HS inner products") {
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    CHECK(hs_inner_product(phi_z, phi_z) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(choi_hs_inner_product(phi_z, phi_z) == doctest::Approx(8.0).epsilon(1e-12));

    // On ham(H): HS = CHOI_HS = 2d·tr(H₁H₂) = d²(d+1)·AVG.
    std::mt19937_64 rng(22);
    for (int d : {2, 3, 4}) {
        const Matrix h1 = random_traceless_hermitian(rng, d);
        const Matrix h2 = random_traceless_hermitian(rng, d);
        const Superoperator p1 = Superoperator::from_hamiltonian(HermitianOperator(h1));
        const Superoperator p2 = Superoperator::from_hamiltonian(HermitianOperator(h2));
        const double tr = (h1 * h2).trace().real();
        CHECK(hs_inner_product(p1, p2) == doctest::Approx(2.0 * d * tr).epsilon(1e-10));
        CHECK(choi_hs_inner_product(p1, p2) == doctest::Approx(2.0 * d * tr).epsilon(1e-10));
        CHECK(hs_inner_product(p1, p2) ==
              doctest::Approx(d * d * (d + 1) * avg_inner_product(p1, p2)).epsilon(1e-10));
    }
}

TEST_CASE("canonical hamiltonian") {
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    CHECK(max_abs(canonical_hamiltonian(phi_z).matrix() - pauli_z()) < 1e-12);
    const CanonicalDecomposition dec_z = canonicalize(phi_z);
    CHECK(dec_z.jump_terms.empty());

    // traceless jumps, zero Hamiltonian → H = 0
    std::mt19937_64 rng(23);
    for (int d : {2, 3}) {
        Matrix l = random_complex(rng, d);
        l -= (l.trace() / double(d)) * Matrix::Identity(d, d);
        const Superoperator s =
            Superoperator::from_lindblad(HermitianOperator(Matrix::Zero(d, d)), {{0.8, l}});
        CHECK(max_abs(canonical_hamiltonian(s).matrix()) < 1e-11);
    }

    // contraction path = pseudo-Kraus closed form on random generators
    for (int d : {2, 3}) {
        const Superoperator s = random_hpta(rng, d, d * d);
        CHECK(rel_diff(canonical_hamiltonian(s).matrix(),
                       canonical_hamiltonian_kraus(s).matrix()) < 1e-10);
    }

    CHECK_THROWS_AS(canonical_hamiltonian(Superoperator::identity(2)), HermiticityError);
}

TEST_CASE("gauge-shifted amplitude damping") {
    const Matrix l = sigma_minus() + 0.3 * Matrix::Identity(2, 2);
    const Superoperator s =
        Superoperator::from_lindblad(HermitianOperator(Matrix::Zero(2, 2)), {{1.0, l}});
    // H = (0.3/2i)(σ₊ − σ₋) = 0.15 σ_y
    const Matrix expected = 0.15 * pauli_y();
    CHECK(max_abs(canonical_hamiltonian(s).matrix() - expected) < 1e-12);

    const CanonicalDecomposition dec = canonicalize(s);
    CHECK(max_abs(dec.h.matrix() - expected) < 1e-12);
    for (const auto& [gamma, op] : dec.jump_terms) {
        CHECK(std::abs(op.trace()) < 1e-12);
    }
    CHECK(max_abs(dec.reassemble().rep() - s.rep()) < 1e-11);

    // same generator from the explicitly gauge-transformed presentation:
    // D_{L+αI} = D_L − i[H_c, ·] with H_c = (γ/2i)(αL† − ᾱL)
    const Complex alpha(0.3, 0.0);
    const Matrix h_c =
        (1.0 / (2.0 * kImag)) * (alpha * sigma_minus().adjoint() -
                                 std::conj(alpha) * sigma_minus());
    const Superoperator s2 = Superoperator::from_lindblad(
        HermitianOperator(h_c, 1e-9), {{1.0, sigma_minus()}});
    CHECK(max_abs(s2.rep() - s.rep()) < 1e-12);
}

TEST_CASE("canonical hamiltonian MC estimate") {
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    HaarSampler sampler(31, 2);
    const MatrixEstimate est = lindblad_haar_hamiltonian_mc(phi_z, sampler, 20000);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(est.mean(i, j) - pauli_z()(i, j)) <
                  5.0 * est.std_error(i, j) + 1e-12);
}

TEST_CASE("minimality certificate and normal-equations oracle") {
    std::mt19937_64 rng(37);
    const Superoperator s = random_hpta(rng, 2, 3);
    HaarSampler sampler(37, 2);
    const MinimalityReport report = minimality_certificate(s, 100, sampler);
    CHECK(report.pass);
    CHECK(report.max_pythagoras_residual < 1e-8);
    CHECK(report.max_orthogonality_residual < 1e-10);

    CHECK(rel_diff(canonical_hamiltonian(s).matrix(), normal_equations_oracle(s).matrix()) <
          1e-8);

    // Φ_{σ_z}: D = 0, identity degenerates to ‖Φ_G‖² = ‖Φ_G‖².
    const Superoperator phi_z = Superoperator::from_hamiltonian(HermitianOperator(pauli_z()));
    HaarSampler s2(5, 2);
    CHECK(minimality_certificate(canonical_dissipator(phi_z), 20, s2).pass);
}

TEST_CASE("projection equivalence") {
    const Superoperator phi_x = Superoperator::from_hamiltonian(HermitianOperator(pauli_x()));
    const ProjectionReport rx = projection_equivalence(phi_x);
    CHECK(max_abs(rx.h_avg.matrix() - pauli_x()) < 1e-11);
    CHECK(max_abs(rx.h_hs.matrix() - pauli_x()) < 1e-11);
    CHECK(max_abs(rx.h_choi_hs.matrix() - pauli_x()) < 1e-11);

    std::mt19937_64 rng(41);
    const Superoperator s = random_hpta(rng, 3, 4);
    CHECK(projection_equivalence(s).max_disagreement < 1e-10 * (1.0 + max_abs(s.rep())));

    Matrix l = random_complex(rng, 2);
    l -= (l.trace() / 2.0) * Matrix::Identity(2, 2);
    const Superoperator diss =
        Superoperator::from_lindblad(HermitianOperator(Matrix::Zero(2, 2)), {{1.0, l}});
    const ProjectionReport rd = projection_equivalence(diss);
    CHECK(max_abs(rd.h_avg.matrix()) < 1e-11);
    CHECK(max_abs(rd.h_hs.matrix()) < 1e-11);
    CHECK(max_abs(rd.h_choi_hs.matrix()) < 1e-11);
}

TEST_CASE("markovianity") {
    const Superoperator damp = Superoperator::from_lindblad(
        HermitianOperator(Matrix::Zero(2, 2)), {{0.5, sigma_minus()}});
    CHECK(markovianity_check(damp));
    const Superoperator anti = Superoperator::from_lindblad(
        HermitianOperator(Matrix::Zero(2, 2)), {{-0.5, sigma_minus()}});
    CHECK_FALSE(markovianity_check(anti));
    std::mt19937_64 rng(43);
    CHECK(markovianity_check(random_hpta(rng, 3, 3, /*markovian=*/true)));
}

TEST_CASE("psi map identity") {
    // L*(ρ) = i[H,ρ] + Ψ(ρ) − ½{Ψ(I), ρ} for Markovian generators.
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = (trial % 2 == 0) ? 2 : 3;
        const Superoperator s = random_hpta(rng, d, 3, /*markovian=*/true);
        const Matrix h = canonical_hamiltonian(s).matrix();
        const Matrix rho = random_hermitian(rng, d);
        const Matrix psi_rho = psi_map(s, rho);
        const Matrix psi_id = psi_map(s, Matrix::Identity(d, d));
        const Matrix lhs = s.adjoint().apply(rho);
        const Matrix rhs = kImag * (h * rho - rho * h) + psi_rho -
                           0.5 * (psi_id * rho + rho * psi_id);
        CHECK(max_abs(lhs - rhs) < 1e-10 * (1.0 + max_abs(lhs)));
    }
}

TEST_CASE("avg norm MC reference independence") {
    std::mt19937_64 rng(53);
    const Superoperator s = random_hpta(rng, 2, 2);
    const double exact = avg_norm_squared(s);
    Vector ref0(2), ref1(2);
    ref0 << 1.0, 0.0;
    ref1 << std::sqrt(0.3), Complex(0.0, std::sqrt(0.7));
    HaarSampler s0(61, 2), s1(67, 2);
    const ScalarEstimate e0 = avg_norm_squared_mc(s, s0, 20000, ref0);
    const ScalarEstimate e1 = avg_norm_squared_mc(s, s1, 20000, ref1);
    CHECK(std::abs(e0.mean - exact) < 5.0 * e0.std_error + 1e-12);
    CHECK(std::abs(e1.mean - exact) < 5.0 * e1.std_error + 1e-12);
}

TEST_SUITE_END();
