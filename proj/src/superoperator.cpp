#include "canon/superoperator.hpp"

#include <cmath>

namespace canon {

namespace {

Matrix choi_from_rep(const Matrix& rep, int d) {
    Matrix choi(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int alpha = 0; alpha < d; ++alpha)
            for (int n = 0; n < d; ++n)
                for (int beta = 0; beta < d; ++beta)
                    choi(m * d + alpha, n * d + beta) = rep(n * d + m, beta * d + alpha);
    return choi;
}

Matrix rep_from_choi(const Matrix& choi, int d) {
    Matrix rep(d * d, d * d);
    for (int m = 0; m < d; ++m)
        for (int alpha = 0; alpha < d; ++alpha)
            for (int n = 0; n < d; ++n)
                for (int beta = 0; beta < d; ++beta)
                    rep(n * d + m, beta * d + alpha) = choi(m * d + alpha, n * d + beta);
    return rep;
}

}  // namespace

Superoperator::Superoperator(int d, Matrix rep) : d_(d), rep_(std::move(rep)) {
    if (d < 1 || rep_.rows() != static_cast<Eigen::Index>(d) * d ||
        rep_.cols() != static_cast<Eigen::Index>(d) * d) {
        throw DimensionError("Superoperator: rep must be d²×d²");
    }
    choi_ = choi_from_rep(rep_, d_);
}

Superoperator Superoperator::zero(int d) {
    return Superoperator(d, Matrix::Zero(d * d, d * d));
}

Superoperator Superoperator::identity(int d) {
    return Superoperator(d, Matrix::Identity(d * d, d * d));
}

Superoperator Superoperator::from_hamiltonian(const HermitianOperator& h) {
    const int d = h.dim();
    const Matrix& hm = h.matrix();
    const Matrix eye = Matrix::Identity(d, d);
    // vec(−i[H,M]) = −i(I⊗H − Hᵀ⊗I) vec(M)
    Matrix rep = -kImag * (tensor_product(eye, hm) - tensor_product(hm.transpose(), eye));
    return Superoperator(d, std::move(rep));
}

Superoperator Superoperator::from_lindblad(
    const HermitianOperator& h, const std::vector<std::pair<double, Matrix>>& terms) {
    const int d = h.dim();
    const Matrix eye = Matrix::Identity(d, d);
    Matrix rep = from_hamiltonian(h).rep();
    for (const auto& [gamma, L] : terms) {
        if (L.rows() != d || L.cols() != d) {
            throw DimensionError("from_lindblad: jump operator dimension mismatch");
        }
        const Matrix LdL = L.adjoint() * L;
        rep += gamma * (tensor_product(L.conjugate(), L) -
                        0.5 * tensor_product(eye, LdL) -
                        0.5 * tensor_product(LdL.transpose(), eye));
    }
    return Superoperator(d, std::move(rep));
}

Superoperator Superoperator::from_choi(const Matrix& choi) {
    if (choi.rows() != choi.cols()) {
        throw DimensionError("from_choi: Choi matrix must be square");
    }
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(choi.rows()))));
    if (static_cast<Eigen::Index>(d) * d != choi.rows()) {
        throw DimensionError("from_choi: Choi dimension is not a perfect square");
    }
    return Superoperator(d, rep_from_choi(choi, d));
}

Superoperator Superoperator::from_action(int d,
                                         const std::function<Matrix(const Matrix&)>& action) {
    Matrix rep(d * d, d * d);
    Matrix basis = Matrix::Zero(d, d);
    for (int beta = 0; beta < d; ++beta) {
        for (int alpha = 0; alpha < d; ++alpha) {
            basis(alpha, beta) = 1.0;
            rep.col(beta * d + alpha) = vec(action(basis));
            basis(alpha, beta) = 0.0;
        }
    }
    return Superoperator(d, std::move(rep));
}

Matrix Superoperator::apply(const Matrix& m) const {
    if (m.rows() != d_ || m.cols() != d_) {
        throw DimensionError("Superoperator::apply: operand dimension mismatch");
    }
    return unvec(rep_ * vec(m), d_);
}

Superoperator Superoperator::adjoint() const {
    // Defined by tr(L*(A)† B) = tr(A† L(B)); in vec form rep(L*) = rep(L)†.
    return Superoperator(d_, rep_.adjoint());
}

Superoperator Superoperator::compose(const Superoperator& rhs) const {
    if (rhs.d_ != d_) throw DimensionError("compose: dimension mismatch");
    return Superoperator(d_, rep_ * rhs.rep_);
}

Superoperator Superoperator::operator+(const Superoperator& rhs) const {
    if (rhs.d_ != d_) throw DimensionError("operator+: dimension mismatch");
    return Superoperator(d_, rep_ + rhs.rep_);
}

Superoperator Superoperator::operator-(const Superoperator& rhs) const {
    if (rhs.d_ != d_) throw DimensionError("operator-: dimension mismatch");
    return Superoperator(d_, rep_ - rhs.rep_);
}

HptaDiagnostics check_hpta(const Superoperator& s, double tol) {
    HptaDiagnostics diag;
    const Matrix& choi = s.choi();
    const double choi_scale = 1.0 + max_abs(choi);
    diag.hermiticity_residual = max_abs(choi - choi.adjoint().eval()) / choi_scale;
    const int d = s.dim();
    const Matrix adj_id = unvec(s.rep().adjoint() * vec(Matrix::Identity(d, d)), d);
    const double rep_scale = 1.0 + max_abs(s.rep());
    diag.trace_residual = max_abs(adj_id) / rep_scale;
    diag.ok = diag.hermiticity_residual <= tol && diag.trace_residual <= tol;
    return diag;
}

bool is_hpta(const Superoperator& s, double tol) {
    return check_hpta(s, tol).ok;
}

Superoperator PseudoKrausDecomposition::reconstruct() const {
    Matrix rep = Matrix::Zero(d * d, d * d);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        rep += weights[j] * tensor_product(operators[j].conjugate(), operators[j]);
    }
    return Superoperator(d, std::move(rep));
}

PseudoKrausDecomposition pseudo_kraus(const Superoperator& s, double rank_tol) {
    const int d = s.dim();
    const Matrix& choi = s.choi();
    const double herm_res = max_abs(choi - choi.adjoint().eval()) / (1.0 + max_abs(choi));
    if (herm_res > 1e-10) {
        throw HermiticityError("pseudo_kraus: Choi hermiticity residual " +
                               std::to_string(herm_res));
    }
    PseudoKrausDecomposition out;
    out.d = d;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi + choi.adjoint().eval()));
    const Eigen::VectorXd& w = es.eigenvalues();
    const double max_w = w.cwiseAbs().maxCoeff();
    if (max_w == 0.0) return out;  // zero superoperator: empty term list
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (std::abs(w(j)) <= rank_tol * max_w) continue;
        // Choi = Σ γ_j v_j v_j† with v_j(β·d+α) = (E_j)_{βα}.
        Matrix e(d, d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) e(m, n) = es.eigenvectors()(m * d + n, j);
        out.weights.push_back(w(j));
        out.operators.push_back(std::move(e));
    }
    return out;
}

}  // namespace canon
