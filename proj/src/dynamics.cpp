#include "canon/dynamics.hpp"

#include <cmath>
#include <limits>

namespace canon {

namespace {

Matrix eigen_propagator(const Eigen::VectorXd& w, const Matrix& v, double t) {
    Vector phases(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) phases(j) = std::exp(Complex(0.0, -w(j) * t));
    return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace

BipartiteSystem::BipartiteSystem(int d_a, int d_b, HermitianOperator h_a_bare,
                                 HermitianOperator h_b_bare, HermitianOperator v,
                                 double lambda, DensityOperator rho_b0)
    : d_a_(d_a),
      d_b_(d_b),
      h_a_(std::move(h_a_bare)),
      h_b_(std::move(h_b_bare)),
      v_(std::move(v)),
      lambda_(lambda),
      rho_b0_(std::move(rho_b0)) {
    if (h_a_.dim() != d_a_ || h_b_.dim() != d_b_ || rho_b0_.dim() != d_b_ ||
        v_.dim() != d_a_ * d_b_) {
        throw DimensionError("BipartiteSystem: inconsistent dimensions");
    }
    const Matrix eye_a = Matrix::Identity(d_a_, d_a_);
    const Matrix eye_b = Matrix::Identity(d_b_, d_b_);
    h_free_ = tensor_product(h_a_.matrix(), eye_b) + tensor_product(eye_a, h_b_.matrix());
    h_total_ = h_free_ + lambda_ * v_.matrix();

    Eigen::SelfAdjointEigenSolver<Matrix> es_tot(h_total_);
    Eigen::SelfAdjointEigenSolver<Matrix> es_free(h_free_);
    Eigen::SelfAdjointEigenSolver<Matrix> es_a(h_a_.matrix());
    if (es_tot.info() != Eigen::Success || es_free.info() != Eigen::Success ||
        es_a.info() != Eigen::Success) {
        throw SingularityError("BipartiteSystem: eigendecomposition failed");
    }
    w_total_ = es_tot.eigenvalues();
    v_total_ = es_tot.eigenvectors();
    w_free_ = es_free.eigenvalues();
    v_free_ = es_free.eigenvectors();
    w_a_ = es_a.eigenvalues();
    v_a_ = es_a.eigenvectors();
}

Matrix BipartiteSystem::total_propagator(double t) const {
    return eigen_propagator(w_total_, v_total_, t);
}

Matrix BipartiteSystem::free_propagator(double t) const {
    return eigen_propagator(w_free_, v_free_, t);
}

Matrix BipartiteSystem::a_propagator(double t) const {
    return eigen_propagator(w_a_, v_a_, t);
}

Superoperator reduced_channel(const BipartiteSystem& sys, double t) {
    const Matrix u = sys.total_propagator(t);
    const Matrix& rho_b = sys.rho_b0().matrix();
    const int d_a = sys.dim_a();
    const int d_b = sys.dim_b();
    return Superoperator::from_action(d_a, [&](const Matrix& m) {
        const Matrix joint = u * tensor_product(m, rho_b) * u.adjoint();
        return partial_trace(joint, Subsystem::B, d_a, d_b);
    });
}

Superoperator reduced_channel_derivative(const BipartiteSystem& sys, double t) {
    const Matrix u = sys.total_propagator(t);
    const Matrix& h_tot = sys.h_total();
    const Matrix& rho_b = sys.rho_b0().matrix();
    const int d_a = sys.dim_a();
    const int d_b = sys.dim_b();
    return Superoperator::from_action(d_a, [&](const Matrix& m) {
        const Matrix joint = u * tensor_product(m, rho_b) * u.adjoint();
        const Matrix comm = h_tot * joint - joint * h_tot;
        return partial_trace(-kImag * comm, Subsystem::B, d_a, d_b);
    });
}

std::pair<Superoperator, ExtractionDiagnostics> extract_generator(const BipartiteSystem& sys,
                                                                  double t,
                                                                  double cond_threshold) {
    if (cond_threshold <= 1.0) {
        throw std::invalid_argument("extract_generator: cond_threshold must exceed 1");
    }
    const Superoperator n_t = reduced_channel(sys, t);
    const Superoperator n_dot = reduced_channel_derivative(sys, t);

    Eigen::JacobiSVD<Matrix> svd(n_t.rep());
    const double sigma_max = svd.singularValues()(0);
    const double sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    if (sigma_min <= 1e-13 * sigma_max) {
        throw SingularityError("extract_generator: N_t numerically singular at t = " +
                               std::to_string(t));
    }
    ExtractionDiagnostics diag;
    diag.condition_number = sigma_max / sigma_min;
    diag.valid = diag.condition_number <= cond_threshold;

    // rep(L) = rep(Ṅ)·rep(N)⁻¹ ⟺ rep(N)ᵀ rep(L)ᵀ = rep(Ṅ)ᵀ
    Eigen::ColPivHouseholderQR<Matrix> qr(n_t.rep().transpose());
    Matrix rep_l = qr.solve(n_dot.rep().transpose()).transpose();
    Superoperator gen(sys.dim_a(), std::move(rep_l));
    diag.hpta = check_hpta(gen, 1e-8);
    return {std::move(gen), std::move(diag)};
}

GeneratorTrajectory canonical_trajectory(const BipartiteSystem& sys,
                                         const std::vector<double>& grid,
                                         double cond_threshold) {
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        if (grid[k + 1] <= grid[k]) {
            throw std::invalid_argument("canonical_trajectory: grid must be strictly increasing");
        }
    }
    if (!grid.empty() && grid.front() < 0.0) {
        throw std::invalid_argument("canonical_trajectory: grid must start at t >= 0");
    }
    GeneratorTrajectory traj;
    traj.points.reserve(grid.size());
    for (double t : grid) {
        TrajectoryPoint pt;
        pt.t = t;
        try {
            auto [gen, diag] = extract_generator(sys, t, cond_threshold);
            pt.condition_number = diag.condition_number;
            pt.valid = diag.valid && diag.hpta.ok;
            pt.generator = std::move(gen);
            if (pt.valid) pt.canonical = canonicalize(*pt.generator);
        } catch (const SingularityError&) {
            pt.valid = false;
            pt.condition_number = std::numeric_limits<double>::infinity();
        }
        traj.points.push_back(std::move(pt));
    }
    return traj;
}

}  // namespace canon
