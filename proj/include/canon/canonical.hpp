// canonical.hpp — Inner products on the space of HPTA superoperators,
// orthogonal projection onto Hamiltonian superoperators, the canonical
// Hamiltonian and minimal dissipator, and Markovianity checks.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "canon/haar.hpp"
#include "canon/superoperator.hpp"

namespace canon {

enum class InnerProductKind { AVG, HS, CHOI_HS };

// ⟨M,N⟩_avg: Haar pair average evaluated in closed form via the pure-state
// symmetric-subspace reduction. Real for hermiticity-preserving inputs.
double avg_inner_product(const Superoperator& m, const Superoperator& n);

// tr[rep(M)† rep(N)] and tr[Choi(M)† Choi(N)].
// Restricted to Hamiltonian superoperators both equal 2d·tr(H₁H₂), which is
// d²(d+1) times the AVG value 2/(d(d+1))·tr(H₁H₂).
double hs_inner_product(const Superoperator& m, const Superoperator& n);
double choi_hs_inner_product(const Superoperator& m, const Superoperator& n);

double inner_product(InnerProductKind kind, const Superoperator& m, const Superoperator& n);

double avg_norm_squared(const Superoperator& s);

// Unique traceless H with s = −i[H,·] + (minimal dissipator).
// Production path: the Kraus-free contraction A_{βγ} = Σ_α ⟨α|s(|α⟩⟨β|)|γ⟩,
// H = (A − A†)/(2id), trace part removed.
HermitianOperator canonical_hamiltonian(const Superoperator& s, double hpta_tol = 1e-8);

// Same Hamiltonian from the pseudo-Kraus closed form
// (1/2id) Σ γ_j (tr(E_j) E_j† − tr(E_j†) E_j); cross-check path.
HermitianOperator canonical_hamiltonian_kraus(const Superoperator& s,
                                              double rank_tol = 1e-10);

// Gram-matrix projection onto {Φ_{H_j}} under the chosen inner product.
HermitianOperator project_hamiltonian(const Superoperator& s, InnerProductKind kind);

// Minimal dissipator s + i[H_canonical, ·].
Superoperator canonical_dissipator(const Superoperator& s);

struct CanonicalDecomposition {
    int d = 0;
    HermitianOperator h;
    std::vector<std::pair<double, Matrix>> jump_terms;  // (γ_j, traceless L_j)

    Superoperator reassemble() const;
};

// Canonical Hamiltonian plus the rates/traceless jumps from the
// eigendecomposition of the projected Choi matrix, sorted by descending rate;
// rates below rank_tol·(1 + ‖rep‖_max) are dropped.
CanonicalDecomposition canonicalize(const Superoperator& s, double rank_tol = 1e-10,
                                    double hpta_tol = 1e-8);

// MC estimate of H = (1/2i)∫dU (U†s(U) − s(U†)U).
MatrixEstimate lindblad_haar_hamiltonian_mc(const Superoperator& s, HaarSampler& sampler,
                                            int n_samples);

// MC estimate of ‖s‖²_avg with an explicit reference state.
ScalarEstimate avg_norm_squared_mc(const Superoperator& s, HaarSampler& sampler,
                                   int n_samples, const Vector& reference);
ScalarEstimate avg_inner_product_mc(const Superoperator& m, const Superoperator& n,
                                    HaarSampler& sampler, int n_samples,
                                    const Vector& reference);

struct MinimalityReport {
    int trials = 0;
    double max_pythagoras_residual = 0.0;  // relative
    double max_orthogonality_residual = 0.0;
    bool pass = false;
};

MinimalityReport minimality_certificate(const Superoperator& s, int trials,
                                        HaarSampler& rng, double pyth_tol = 1e-8,
                                        double ortho_tol = 1e-10);

struct ProjectionReport {
    HermitianOperator h_avg;
    HermitianOperator h_hs;
    HermitianOperator h_choi_hs;
    double max_disagreement = 0.0;
};

ProjectionReport projection_equivalence(const Superoperator& s);

// Ψ(M) = s*(M) − K M − M K† with K = (1/d) Σ γ_j tr(E_j) E_j†, evaluated via
// the Kraus-free contraction (positive-argument reading of the third term).
Matrix psi_map(const Superoperator& s, const Matrix& m, double hpta_tol = 1e-8);

// True iff the generator admits a Lindblad form with nonnegative rates:
// the Choi matrix projected off the maximally entangled vector (which
// carries the canonical rates) is PSD within tol·(max eigenvalue).
bool markovianity_check(const Superoperator& s, double tol = 1e-9);

}  // namespace canon
