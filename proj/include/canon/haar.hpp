// haar.hpp — Haar sampling and exact second/fourth Haar-moment formulas

#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "canon/operator_core.hpp"

namespace canon {

// Seeded Haar-unitary sampler: Ginibre matrix + QR with R-diagonal phase fix.
class HaarSampler {
public:
    HaarSampler(std::uint64_t seed, int d);

    Matrix sample_unitary();
    int dim() const { return d_; }
    std::mt19937_64& engine() { return rng_; }

    // Deterministic child stream for worker `index`.
    HaarSampler child(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    int d_;
    std::mt19937_64 rng_;
};

Matrix random_hermitian(std::mt19937_64& rng, int d);
Matrix random_traceless_hermitian(std::mt19937_64& rng, int d);
Matrix random_complex(std::mt19937_64& rng, int d);

// ∫dU U†MU = (tr M / d) I, evaluated exactly.
Matrix second_moment(const Matrix& m);

// Bilinear functional supplied by its values on elementary pairs.
using PairFunctional = std::function<Complex(const Matrix&, const Matrix&)>;

// Average of f(Uρ₀U†, Uρ₀U†) over Haar U for pure ρ₀.
// Production path: symmetric-subspace reduction
//   (1/(d(d+1))) Σ_{αβ} [ f(|α⟩⟨α|,|β⟩⟨β|) + f(|α⟩⟨β|,|β⟩⟨α|) ].
Complex fourth_moment_contract(const PairFunctional& f, int d);

// Same average via the explicit four-permutation formula for
// ∫dU U⊗U†⊗U⊗U†, kept as an independent oracle.
Complex fourth_moment_contract_permutation(const PairFunctional& f, int d);

// Pair average T = avg(Uρ₀U† ⊗ Uρ₀U†) as a d²×d² matrix, both routes.
Matrix pair_average_symmetric(int d);
Matrix pair_average_permutation(int d);

struct ScalarEstimate {
    Complex mean{};
    double std_error = 0.0;
};

struct MatrixEstimate {
    Matrix mean;
    RealMatrix std_error;  // entrywise standard error of |x − mean|
};

ScalarEstimate mc_average(HaarSampler& sampler, int n_samples,
                          const std::function<Complex(const Matrix&)>& estimand);

MatrixEstimate mc_average_matrix(HaarSampler& sampler, int n_samples,
                                 const std::function<Matrix(const Matrix&)>& estimand);

}  // namespace canon
