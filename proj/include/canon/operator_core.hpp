// operator_core.hpp — Dense complex-matrix primitives for quantum-operator algebra

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace canon {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kImag{0.0, 1.0};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct HermiticityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PositivityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Square matrix certified Hermitian at construction. The stored matrix is
// symmetrized ((M + M†)/2) so downstream eigensolvers see exactly Hermitian
// input.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m, double rel_tol = 1e-12);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }

private:
    Matrix mat_;
};

// Hermitian, positive semidefinite, unit trace.
class DensityOperator {
public:
    explicit DensityOperator(Matrix m, double eig_tol = 1e-10, double trace_tol = 1e-10);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }

private:
    Matrix mat_;
};

// d²−1 traceless Hermitian operators with tr(H_j H_k) = (d(d+1)/2) δ_jk.
struct TracelessHermitianBasis {
    int d = 0;
    std::vector<Matrix> elements;
};

// Kronecker product, A-index major / B-index minor block ordering.
Matrix tensor_product(const Matrix& a, const Matrix& b);

enum class Subsystem { A, B };

// Trace over one factor of a d_a·d_b square matrix.
Matrix partial_trace(const Matrix& m, Subsystem which, int d_a, int d_b);

// e^{−iht} via eigendecomposition of h.
Matrix propagator(const HermitianOperator& h, double t);

// Rescaled generalized Gell-Mann matrices.
TracelessHermitianBasis traceless_basis(int d);

// Column-stacking vectorization: vec(|α⟩⟨β|) occupies index β·d+α.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int d);

double max_abs(const Matrix& m);

}  // namespace canon
