#include "canon/canonical.hpp"

#include <algorithm>
#include <cmath>

namespace canon {

namespace {

Complex trace_product(const Matrix& x, const Matrix& y) {
    // tr(XY) = Σ_{ij} X_ij Y_ji
    return (x.transpose().cwiseProduct(y)).sum();
}

// A_{βγ} = Σ_α ⟨α| s(|α⟩⟨β|) |γ⟩. For s(ρ) = Σγ_j E_j ρ E_j† this equals
// Σ_j γ_j tr(E_j) E_j†.
Matrix contraction_matrix(const Superoperator& s) {
    const int d = s.dim();
    const Matrix& rep = s.rep();
    Matrix a = Matrix::Zero(d, d);
    for (int beta = 0; beta < d; ++beta)
        for (int gamma = 0; gamma < d; ++gamma)
            for (int alpha = 0; alpha < d; ++alpha)
                a(beta, gamma) += rep(gamma * d + alpha, beta * d + alpha);
    return a;
}

Matrix make_traceless(const Matrix& m) {
    const int d = static_cast<int>(m.rows());
    return m - (m.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
}

// Choi matrix compressed to the complement of the maximally entangled vector
// |φ⟩ = Σ_α|αα⟩: Q C Q with Q = I − |φ⟩⟨φ|/d. The Hamiltonian part of any
// HPTA map lives entirely in the discarded block, and what remains is
// Σ_j γ_j (L_j⊗I)|φ⟩⟨φ|(L_j†⊗I) over the traceless canonical jumps — the
// Kossakowski matrix of the generator.
Matrix projected_choi(const Superoperator& s) {
    const int d = s.dim();
    Vector phi = Vector::Zero(d * d);
    for (int a = 0; a < d; ++a) phi[a * d + a] = 1.0;
    const Matrix q =
        Matrix::Identity(d * d, d * d) - (phi * phi.adjoint()) / static_cast<double>(d);
    const Matrix herm = 0.5 * (s.choi() + s.choi().adjoint().eval());
    return q * herm * q;
}

void require_hpta(const Superoperator& s, double tol, const char* who) {
    const HptaDiagnostics diag = check_hpta(s, tol);
    if (!diag.ok) {
        throw HermiticityError(std::string(who) + ": input is not HPTA (hermiticity " +
                               std::to_string(diag.hermiticity_residual) + ", trace " +
                               std::to_string(diag.trace_residual) + ")");
    }
}

}  // namespace

double avg_inner_product(const Superoperator& m, const Superoperator& n) {
    if (m.dim() != n.dim()) throw DimensionError("avg_inner_product: dimension mismatch");
    const int d = m.dim();
    const Matrix m_id = m.apply(Matrix::Identity(d, d));
    const Matrix n_id = n.apply(Matrix::Identity(d, d));
    Complex sum = trace_product(m_id, n_id);
    for (int alpha = 0; alpha < d; ++alpha) {
        for (int beta = 0; beta < d; ++beta) {
            const Matrix x = unvec(m.rep().col(beta * d + alpha), d);
            const Matrix y = unvec(n.rep().col(alpha * d + beta), d);
            sum += trace_product(x, y);
        }
    }
    return sum.real() / (static_cast<double>(d) * d * (d + 1));
}

double hs_inner_product(const Superoperator& m, const Superoperator& n) {
    if (m.dim() != n.dim()) throw DimensionError("hs_inner_product: dimension mismatch");
    return (m.rep().conjugate().cwiseProduct(n.rep())).sum().real();
}

double choi_hs_inner_product(const Superoperator& m, const Superoperator& n) {
    if (m.dim() != n.dim()) throw DimensionError("choi_hs_inner_product: dimension mismatch");
    return (m.choi().conjugate().cwiseProduct(n.choi())).sum().real();
}

double inner_product(InnerProductKind kind, const Superoperator& m, const Superoperator& n) {
    switch (kind) {
        case InnerProductKind::AVG:
            return avg_inner_product(m, n);
        case InnerProductKind::HS:
            return hs_inner_product(m, n);
        case InnerProductKind::CHOI_HS:
            return choi_hs_inner_product(m, n);
    }
    throw std::invalid_argument("inner_product: unknown kind");
}

double avg_norm_squared(const Superoperator& s) { return avg_inner_product(s, s); }

HermitianOperator canonical_hamiltonian(const Superoperator& s, double hpta_tol) {
    require_hpta(s, hpta_tol, "canonical_hamiltonian");
    const int d = s.dim();
    const Matrix a = contraction_matrix(s);
    const Matrix h = (a - a.adjoint().eval()) / (Complex(0.0, 2.0) * static_cast<double>(d));
    return HermitianOperator(make_traceless(h), 1e-9);
}

HermitianOperator canonical_hamiltonian_kraus(const Superoperator& s, double rank_tol) {
    const int d = s.dim();
    const PseudoKrausDecomposition pk = pseudo_kraus(s, rank_tol);
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < pk.weights.size(); ++j) {
        const Matrix& e = pk.operators[j];
        h += pk.weights[j] * (e.trace() * e.adjoint() - std::conj(e.trace()) * e);
    }
    h /= Complex(0.0, 2.0) * static_cast<double>(d);
    return HermitianOperator(make_traceless(h), 1e-9);
}

HermitianOperator project_hamiltonian(const Superoperator& s, InnerProductKind kind) {
    const int d = s.dim();
    const TracelessHermitianBasis basis = traceless_basis(d);
    const std::size_t n = basis.elements.size();
    std::vector<Superoperator> phis;
    phis.reserve(n);
    for (const auto& hj : basis.elements) {
        phis.push_back(Superoperator::from_hamiltonian(HermitianOperator(hj)));
    }
    Eigen::MatrixXd gram(n, n);
    Eigen::VectorXd b(n);
    for (std::size_t j = 0; j < n; ++j) {
        b(j) = inner_product(kind, phis[j], s);
        for (std::size_t k = 0; k < n; ++k) gram(j, k) = inner_product(kind, phis[j], phis[k]);
    }
    Eigen::VectorXd c = gram.ldlt().solve(b);
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < n; ++j) h += c(j) * basis.elements[j];
    return HermitianOperator(make_traceless(h), 1e-9);
}

Superoperator canonical_dissipator(const Superoperator& s) {
    return s - Superoperator::from_hamiltonian(canonical_hamiltonian(s));
}

Superoperator CanonicalDecomposition::reassemble() const {
    return Superoperator::from_lindblad(h, jump_terms);
}

CanonicalDecomposition canonicalize(const Superoperator& s, double rank_tol, double hpta_tol) {
    require_hpta(s, hpta_tol, "canonicalize");
    const int d = s.dim();
    HermitianOperator h = canonical_hamiltonian(s, hpta_tol);

    Eigen::SelfAdjointEigenSolver<Matrix> es(projected_choi(s));
    const double threshold = rank_tol * (1.0 + max_abs(s.rep()));
    std::vector<std::pair<double, Matrix>> terms;
    for (int j = 0; j < es.eigenvalues().size(); ++j) {
        const double gamma = es.eigenvalues()[j];
        if (std::abs(gamma) <= threshold) continue;
        Matrix l(d, d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) l(m, n) = es.eigenvectors()(m * d + n, j);
        terms.emplace_back(gamma, make_traceless(l));
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    return CanonicalDecomposition{d, std::move(h), std::move(terms)};
}

MatrixEstimate lindblad_haar_hamiltonian_mc(const Superoperator& s, HaarSampler& sampler,
                                            int n_samples) {
    const Complex half_over_i = 1.0 / Complex(0.0, 2.0);
    return mc_average_matrix(sampler, n_samples, [&](const Matrix& u) -> Matrix {
        return half_over_i * (u.adjoint() * s.apply(u) - s.apply(u.adjoint()) * u);
    });
}

ScalarEstimate avg_inner_product_mc(const Superoperator& m, const Superoperator& n,
                                    HaarSampler& sampler, int n_samples,
                                    const Vector& reference) {
    if (n_samples < 2) throw DimensionError("avg_inner_product_mc: need at least 2 samples");
    const Vector ref = reference / reference.norm();
    std::vector<Complex> values(static_cast<std::size_t>(n_samples));
    Complex sum = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const Matrix u = sampler.sample_unitary();
        const Matrix v = sampler.sample_unitary();
        const Vector phi = u * ref;
        const Vector psi = v * ref;
        const Matrix proj = phi * phi.adjoint();
        values[k] = psi.adjoint() * (m.apply(proj) * n.apply(proj)) * psi;
        sum += values[k];
    }
    ScalarEstimate est;
    est.mean = sum / static_cast<double>(n_samples);
    double sq = 0.0;
    for (const Complex& v : values) sq += std::norm(v - est.mean);
    est.std_error = std::sqrt(sq / (static_cast<double>(n_samples) * (n_samples - 1)));
    return est;
}

ScalarEstimate avg_norm_squared_mc(const Superoperator& s, HaarSampler& sampler,
                                   int n_samples, const Vector& reference) {
    return avg_inner_product_mc(s, s, sampler, n_samples, reference);
}

MinimalityReport minimality_certificate(const Superoperator& s, int trials, HaarSampler& rng,
                                        double pyth_tol, double ortho_tol) {
    const int d = s.dim();
    const Superoperator dissipator = canonical_dissipator(s);
    const double norm_d2 = avg_norm_squared(dissipator);
    MinimalityReport report;
    report.trials = trials;
    for (int k = 0; k < trials; ++k) {
        const Matrix g = random_traceless_hermitian(rng.engine(), d);
        const Superoperator phi_g = Superoperator::from_hamiltonian(HermitianOperator(g));
        const double norm_g2 = avg_norm_squared(phi_g);
        const double cross = avg_inner_product(dissipator, phi_g);
        const double lhs = avg_norm_squared(dissipator + phi_g);
        const double pyth = std::abs(lhs - norm_d2 - norm_g2) / (norm_d2 + norm_g2 + 1e-300);
        const double ortho = std::abs(cross) / (1.0 + std::sqrt(norm_d2 * norm_g2));
        report.max_pythagoras_residual = std::max(report.max_pythagoras_residual, pyth);
        report.max_orthogonality_residual = std::max(report.max_orthogonality_residual, ortho);
    }
    report.pass = report.max_pythagoras_residual <= pyth_tol &&
                  report.max_orthogonality_residual <= ortho_tol;
    return report;
}

ProjectionReport projection_equivalence(const Superoperator& s) {
    HermitianOperator h_avg = project_hamiltonian(s, InnerProductKind::AVG);
    HermitianOperator h_hs = project_hamiltonian(s, InnerProductKind::HS);
    HermitianOperator h_choi = project_hamiltonian(s, InnerProductKind::CHOI_HS);
    double diff = std::max({max_abs(h_avg.matrix() - h_hs.matrix()),
                            max_abs(h_avg.matrix() - h_choi.matrix()),
                            max_abs(h_hs.matrix() - h_choi.matrix())});
    return ProjectionReport{std::move(h_avg), std::move(h_hs), std::move(h_choi), diff};
}

Matrix psi_map(const Superoperator& s, const Matrix& m, double hpta_tol) {
    require_hpta(s, hpta_tol, "psi_map");
    const int d = s.dim();
    if (m.rows() != d || m.cols() != d) throw DimensionError("psi_map: operand mismatch");
    // ∫dU s*(U†)U = (1/d) Σ γ_j tr(E_j) E_j† = A/d via the second-moment identity.
    const Matrix k = contraction_matrix(s) / static_cast<double>(d);
    return s.adjoint().apply(m) - k * m - m * k.adjoint();
}

bool markovianity_check(const Superoperator& s, double tol) {
    // GKSL ⟺ nonnegative canonical rates ⟺ the projected Choi is PSD.
    Eigen::SelfAdjointEigenSolver<Matrix> es(projected_choi(s), Eigen::EigenvaluesOnly);
    const double max_eig = es.eigenvalues().maxCoeff();
    if (max_eig <= 0.0) {
        // No positive part: Markovian only if the dissipator vanishes.
        return es.eigenvalues().minCoeff() >= -tol;
    }
    return es.eigenvalues().minCoeff() >= -tol * max_eig;
}

}  // namespace canon
