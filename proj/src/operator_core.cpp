#include "canon/operator_core.hpp"

#include <cmath>

namespace canon {

double max_abs(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(Matrix m, double rel_tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError("HermitianOperator: matrix must be square and nonempty");
    }
    const double scale = 1.0 + max_abs(m);
    const double residual = max_abs(m - m.adjoint().eval());
    if (residual > rel_tol * scale) {
        throw HermiticityError("HermitianOperator: hermiticity residual " +
                               std::to_string(residual) + " exceeds tolerance");
    }
    mat_ = 0.5 * (m + m.adjoint().eval());
}

DensityOperator::DensityOperator(Matrix m, double eig_tol, double trace_tol) {
    HermitianOperator h(std::move(m));
    mat_ = h.matrix();
    const double tr_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
    if (tr_err > trace_tol) {
        throw PositivityError("DensityOperator: trace deviates from 1 by " +
                              std::to_string(tr_err));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw PositivityError("DensityOperator: eigendecomposition failed");
    }
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -eig_tol) {
        throw PositivityError("DensityOperator: minimum eigenvalue " +
                              std::to_string(min_eig) + " below tolerance");
    }
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix partial_trace(const Matrix& m, Subsystem which, int d_a, int d_b) {
    const Eigen::Index d = static_cast<Eigen::Index>(d_a) * d_b;
    if (m.rows() != d || m.cols() != d) {
        throw DimensionError("partial_trace: matrix dimension does not equal d_a*d_b");
    }
    if (which == Subsystem::B) {
        Matrix out = Matrix::Zero(d_a, d_a);
        for (int i = 0; i < d_a; ++i)
            for (int j = 0; j < d_a; ++j)
                for (int k = 0; k < d_b; ++k)
                    out(i, j) += m(i * d_b + k, j * d_b + k);
        return out;
    }
    Matrix out = Matrix::Zero(d_b, d_b);
    for (int k = 0; k < d_b; ++k)
        for (int l = 0; l < d_b; ++l)
            for (int i = 0; i < d_a; ++i)
                out(k, l) += m(i * d_b + k, i * d_b + l);
    return out;
}

Matrix propagator(const HermitianOperator& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success) {
        throw SingularityError("propagator: eigendecomposition failed");
    }
    const Eigen::VectorXd& w = es.eigenvalues();
    Vector phases(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        phases(j) = std::exp(Complex(0.0, -w(j) * t));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

TracelessHermitianBasis traceless_basis(int d) {
    if (d < 2) throw DimensionError("traceless_basis: d must be >= 2");
    // Generalized Gell-Mann matrices, tr(G²)=2, rescaled so tr(H_j H_k) = (d(d+1)/2) δ_jk.
    const double scale = std::sqrt(d * (d + 1) / 4.0);
    TracelessHermitianBasis basis;
    basis.d = d;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            Matrix sym = Matrix::Zero(d, d);
            sym(j, k) = 1.0;
            sym(k, j) = 1.0;
            basis.elements.push_back(scale * sym);
            Matrix asym = Matrix::Zero(d, d);
            asym(j, k) = Complex(0.0, -1.0);
            asym(k, j) = Complex(0.0, 1.0);
            basis.elements.push_back(scale * asym);
        }
    }
    for (int l = 1; l < d; ++l) {
        Matrix diag = Matrix::Zero(d, d);
        const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -l * norm;
        basis.elements.push_back(scale * diag);
    }
    return basis;
}

Vector vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d) {
        throw DimensionError("unvec: vector length is not d²");
    }
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

}  // namespace canon
