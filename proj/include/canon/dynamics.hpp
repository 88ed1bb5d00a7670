// dynamics.hpp — Exact bipartite evolution: N_t, its analytic derivative,
// generator extraction L_t = Ṅ_t ∘ N_t⁻¹, and canonical trajectories.

#pragma once

#include <optional>
#include <vector>

#include "canon/canonical.hpp"
#include "canon/superoperator.hpp"

namespace canon {

class BipartiteSystem {
public:
    BipartiteSystem(int d_a, int d_b, HermitianOperator h_a_bare, HermitianOperator h_b_bare,
                    HermitianOperator v, double lambda, DensityOperator rho_b0);

    int dim_a() const { return d_a_; }
    int dim_b() const { return d_b_; }
    const HermitianOperator& h_a_bare() const { return h_a_; }
    const HermitianOperator& h_b_bare() const { return h_b_; }
    const HermitianOperator& v() const { return v_; }
    double lambda() const { return lambda_; }
    const DensityOperator& rho_b0() const { return rho_b0_; }

    const Matrix& h_total() const { return h_total_; }
    const Matrix& h_free() const { return h_free_; }  // H₀ = H_A⊗I + I⊗H_B

    Matrix total_propagator(double t) const;  // e^{−iH_tot t}, cached eigenbasis
    Matrix free_propagator(double t) const;   // e^{−iH₀ t}
    Matrix a_propagator(double t) const;      // e^{−i h_A_bare t}

private:
    int d_a_, d_b_;
    HermitianOperator h_a_, h_b_, v_;
    double lambda_;
    DensityOperator rho_b0_;
    Matrix h_total_, h_free_;
    Eigen::VectorXd w_total_, w_free_, w_a_;
    Matrix v_total_, v_free_, v_a_;
};

// N_t(M) = tr_B[U(t) (M ⊗ ρ_B0) U(t)†].
Superoperator reduced_channel(const BipartiteSystem& sys, double t);

// Ṅ_t(M) = tr_B[−i[H_tot, U(t)(M⊗ρ_B0)U(t)†]], analytic (no finite differences).
Superoperator reduced_channel_derivative(const BipartiteSystem& sys, double t);

struct ExtractionDiagnostics {
    double condition_number = 0.0;
    bool valid = false;
    HptaDiagnostics hpta;
};

// Solve rep(L_t)·rep(N_t) = rep(Ṅ_t). Throws SingularityError when N_t is
// numerically singular; flags invalid above cond_threshold.
std::pair<Superoperator, ExtractionDiagnostics> extract_generator(
    const BipartiteSystem& sys, double t, double cond_threshold = 1e8);

struct TrajectoryPoint {
    double t = 0.0;
    bool valid = false;
    double condition_number = 0.0;
    std::optional<Superoperator> generator;
    std::optional<CanonicalDecomposition> canonical;
};

struct GeneratorTrajectory {
    std::vector<TrajectoryPoint> points;
};

GeneratorTrajectory canonical_trajectory(const BipartiteSystem& sys,
                                         const std::vector<double>& grid,
                                         double cond_threshold = 1e8);

}  // namespace canon
