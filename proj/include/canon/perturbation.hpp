// perturbation.hpp — Dyson-term construction of the perturbative channel,
// the recursive generator hierarchy, and closed forms at orders 0–2.

#pragma once

#include <vector>

#include "canon/dynamics.hpp"

namespace canon {

// V_int(t) = e^{iH₀t} V e^{−iH₀t}.
HermitianOperator v_interaction(const BipartiteSystem& sys, double t);

// Interaction-picture Dyson terms U_I^(k)(t) on the joint space, integrated
// from U̇^(k) = −i V_int(t) U^(k−1) with fixed-step RK4 and stored on `grid`.
class DysonTerms {
public:
    static DysonTerms compute(const BipartiteSystem& sys, int k_max,
                              const std::vector<double>& grid, double step = 1e-3);

    int k_max() const { return k_max_; }
    const std::vector<double>& grid() const { return grid_; }
    const Matrix& term(int k, std::size_t grid_index) const;
    std::size_t grid_index(double t) const;  // throws if t is not on the grid

private:
    int k_max_ = 0;
    std::vector<double> grid_;
    std::vector<std::vector<Matrix>> terms_;  // [grid_index][k]
};

// N_t^(k)(M) = e^{−ih_At} tr_B[Σ_{m+n=k} U^(m)(M⊗ρ_B0)U^(n)†] e^{ih_At}.
Superoperator perturbative_channel(const BipartiteSystem& sys, const DysonTerms& dyson,
                                   int k, double t);

// Analytic d/dt of N_t^(k) via U̇^(k) = −i V_int U^(k−1).
Superoperator perturbative_channel_derivative(const BipartiteSystem& sys,
                                              const DysonTerms& dyson, int k, double t);

struct PerturbativeGenerator {
    int k_max = 0;
    std::vector<double> grid;
    std::vector<std::vector<Superoperator>> terms;  // [grid_index][k]

    // Σ_{k≤k_max} λᵏ L^(k) at a grid point.
    Superoperator resummed(std::size_t grid_index, double lambda) const;
};

// L^(k) from the recursion seeded with L^(0)(M) = −i[h_A_bare, M].
PerturbativeGenerator recursive_generator(const BipartiteSystem& sys, int k_max,
                                          const std::vector<double>& grid,
                                          double step = 1e-3);

// L^(2)(M) = tr_B[V − V̂⊗I_B, [M⊗ρ_B0, Ṽ(t)]] with V̂ = tr_B(Vρ_B0) and
// Ṽ(t) = e^{−iH₀t}(∫₀ᵗV_int)e^{iH₀t} (composite Simpson). Matches the
// recursion at order 2 when ρ_B0 is stationary under h_B_bare; the recursion
// itself carries no such restriction.
Superoperator closed_form_l2(const BipartiteSystem& sys, double t, double step = 1e-3);

// Canonical Hamiltonian of L^(2) from the explicit quadratic closed form,
// returned traceless. Same stationarity caveat as closed_form_l2.
HermitianOperator canonical_h2(const BipartiteSystem& sys, double t, double step = 1e-3);

}  // namespace canon
