// superoperator.hpp — Matrix and Choi representations of superoperators on B(H)

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "canon/operator_core.hpp"

namespace canon {

// Linear map on operators, stored as a d²×d² matrix in the column-stacking
// vectorization convention, with its Choi matrix cached.
// Choi convention: Choi(L) = Σ_{αβ} L(|α⟩⟨β|) ⊗ |α⟩⟨β| (output factor first).
class Superoperator {
public:
    Superoperator(int d, Matrix rep);

    static Superoperator zero(int d);
    static Superoperator identity(int d);
    static Superoperator from_hamiltonian(const HermitianOperator& h);
    static Superoperator from_lindblad(
        const HermitianOperator& h,
        const std::vector<std::pair<double, Matrix>>& terms);
    static Superoperator from_choi(const Matrix& choi);
    static Superoperator from_action(int d,
                                     const std::function<Matrix(const Matrix&)>& action);

    int dim() const { return d_; }
    const Matrix& rep() const { return rep_; }
    const Matrix& choi() const { return choi_; }

    Matrix apply(const Matrix& m) const;
    Superoperator adjoint() const;
    Superoperator compose(const Superoperator& rhs) const;  // this ∘ rhs

    Superoperator operator+(const Superoperator& rhs) const;
    Superoperator operator-(const Superoperator& rhs) const;
    friend Superoperator operator*(double c, const Superoperator& s) {
        return Superoperator(s.d_, c * s.rep_);
    }

private:
    int d_;
    Matrix rep_;
    Matrix choi_;
};

struct HptaDiagnostics {
    double hermiticity_residual = 0.0;  // ‖Choi − Choi†‖_max, relative
    double trace_residual = 0.0;        // ‖adjoint(s)(I)‖_max, relative
    bool ok = false;
};

HptaDiagnostics check_hpta(const Superoperator& s, double tol);
bool is_hpta(const Superoperator& s, double tol);

// L(ρ) = Σ_j γ_j E_j ρ E_j† with real (possibly negative) weights, from the
// Choi eigendecomposition. Eigenvectors are unit-norm, so ‖E_j‖_F = 1 and the
// weights are raw Choi eigenvalues.
struct PseudoKrausDecomposition {
    int d = 0;
    std::vector<double> weights;
    std::vector<Matrix> operators;

    Superoperator reconstruct() const;
};

PseudoKrausDecomposition pseudo_kraus(const Superoperator& s, double rank_tol = 1e-10);

}  // namespace canon
