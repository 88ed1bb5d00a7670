#include "canon/haar.hpp"

#include <array>
#include <cmath>

namespace canon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

HaarSampler::HaarSampler(std::uint64_t seed, int d) : seed_(seed), d_(d), rng_(seed) {
    if (d < 1) throw DimensionError("HaarSampler: d must be positive");
}

HaarSampler HaarSampler::child(std::uint64_t index) const {
    return HaarSampler(splitmix64(seed_ ^ splitmix64(index + 1)), d_);
}

Matrix random_complex(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
    return g;
}

Matrix random_hermitian(std::mt19937_64& rng, int d) {
    Matrix g = random_complex(rng, d);
    return 0.5 * (g + g.adjoint().eval());
}

Matrix random_traceless_hermitian(std::mt19937_64& rng, int d) {
    Matrix h = random_hermitian(rng, d);
    h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
    return h;
}

Matrix HaarSampler::sample_unitary() {
    Matrix g = random_complex(rng_, d_);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d_, d_);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Phase fix: divide each column of Q by the phase of the matching R diagonal.
    for (int j = 0; j < d_; ++j) {
        const Complex rjj = r(j, j);
        const double mod = std::abs(rjj);
        if (mod > 0.0) q.col(j) *= rjj / mod;
    }
    return q;
}

Matrix second_moment(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("second_moment: matrix must be square");
    const int d = static_cast<int>(m.rows());
    return (m.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
}

Complex fourth_moment_contract(const PairFunctional& f, int d) {
    Matrix ea = Matrix::Zero(d, d);
    Matrix eb = Matrix::Zero(d, d);
    Complex sum = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            ea.setZero();
            eb.setZero();
            ea(a, a) = 1.0;
            eb(b, b) = 1.0;
            sum += f(ea, eb);
            ea.setZero();
            eb.setZero();
            ea(a, b) = 1.0;
            eb(b, a) = 1.0;
            sum += f(ea, eb);
        }
    }
    return sum / (static_cast<double>(d) * (d + 1));
}

Matrix pair_average_symmetric(int d) {
    Matrix t = Matrix::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            // |α⟩⟨α| ⊗ |β⟩⟨β| + |α⟩⟨β| ⊗ |β⟩⟨α|
            t(a * d + b, a * d + b) += 1.0;
            t(a * d + b, b * d + a) += 1.0;
        }
    }
    return t / (static_cast<double>(d) * (d + 1));
}

namespace {

// Operator on H⊗4 mapping system j to σ(j).
Matrix permutation_operator(const std::array<int, 4>& sigma, int d) {
    const int dim = d * d * d * d;
    Matrix v = Matrix::Zero(dim, dim);
    std::array<int, 4> in{}, out{};
    for (int idx = 0; idx < dim; ++idx) {
        int rem = idx;
        for (int k = 3; k >= 0; --k) {
            in[k] = rem % d;
            rem /= d;
        }
        for (int k = 0; k < 4; ++k) out[sigma[k] - 1] = in[k];
        int row = 0;
        for (int k = 0; k < 4; ++k) row = row * d + out[k];
        v(row, idx) = 1.0;
    }
    return v;
}

Matrix fourth_moment_operator(int d) {
    const double c1 = 1.0 / (static_cast<double>(d) * d - 1.0);
    const double c2 = -1.0 / (d * (static_cast<double>(d) * d - 1.0));
    return c1 * (permutation_operator({2, 1, 4, 3}, d) +
                 permutation_operator({4, 3, 2, 1}, d)) +
           c2 * (permutation_operator({2, 3, 4, 1}, d) +
                 permutation_operator({4, 1, 2, 3}, d));
}

}  // namespace

Matrix pair_average_permutation(int d) {
    const Matrix w = fourth_moment_operator(d);
    Matrix t(d * d, d * d);
    auto idx4 = [d](int i1, int i2, int i3, int i4) {
        return ((i1 * d + i2) * d + i3) * d + i4;
    };
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int g = 0; g < d; ++g)
                for (int e = 0; e < d; ++e)
                    t(a * d + b, g * d + e) = w(idx4(a, 0, b, 0), idx4(0, g, 0, e));
    return t;
}

Complex fourth_moment_contract_permutation(const PairFunctional& f, int d) {
    const Matrix t = pair_average_permutation(d);
    Matrix ea = Matrix::Zero(d, d);
    Matrix eb = Matrix::Zero(d, d);
    Complex sum = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int g = 0; g < d; ++g)
                for (int e = 0; e < d; ++e) {
                    const Complex coeff = t(a * d + b, g * d + e);
                    if (coeff == Complex(0.0, 0.0)) continue;
                    ea.setZero();
                    eb.setZero();
                    ea(a, g) = 1.0;
                    eb(b, e) = 1.0;
                    sum += coeff * f(ea, eb);
                }
    return sum;
}

ScalarEstimate mc_average(HaarSampler& sampler, int n_samples,
                          const std::function<Complex(const Matrix&)>& estimand) {
    if (n_samples < 2) throw DimensionError("mc_average: need at least 2 samples");
    Complex sum = 0.0;
    double sum_sq = 0.0;
    std::vector<Complex> values(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        values[k] = estimand(sampler.sample_unitary());
        sum += values[k];
    }
    ScalarEstimate est;
    est.mean = sum / static_cast<double>(n_samples);
    for (int k = 0; k < n_samples; ++k) sum_sq += std::norm(values[k] - est.mean);
    est.std_error = std::sqrt(sum_sq / (static_cast<double>(n_samples) * (n_samples - 1)));
    return est;
}

MatrixEstimate mc_average_matrix(HaarSampler& sampler, int n_samples,
                                 const std::function<Matrix(const Matrix&)>& estimand) {
    if (n_samples < 2) throw DimensionError("mc_average_matrix: need at least 2 samples");
    Matrix sum;
    RealMatrix sum_sq;
    Matrix first = estimand(sampler.sample_unitary());
    sum = first;
    sum_sq = first.cwiseAbs2().real();
    for (int k = 1; k < n_samples; ++k) {
        Matrix x = estimand(sampler.sample_unitary());
        sum += x;
        sum_sq += x.cwiseAbs2().real();
    }
    MatrixEstimate est;
    est.mean = sum / static_cast<double>(n_samples);
    // Var(|x|) bound: E|x|² − |mean|², entrywise.
    RealMatrix var =
        (sum_sq / static_cast<double>(n_samples) - est.mean.cwiseAbs2().real())
            .cwiseMax(0.0);
    est.std_error = (var / static_cast<double>(n_samples - 1)).cwiseSqrt();
    return est;
}

}  // namespace canon
