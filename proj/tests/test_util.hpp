// Shared fixtures: Pauli matrices and randomized generator builders.

#pragma once

#include <random>
#include <utility>
#include <vector>

#include "canon/canonical.hpp"
#include "canon/haar.hpp"
#include "canon/superoperator.hpp"

namespace canon::testutil {

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline Matrix swap_gate() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1.0;
    return m;
}

// Generic HPTA generator: Hamiltonian part plus jump terms with rates of
// either sign.
inline Superoperator random_hpta(std::mt19937_64& rng, int d, int n_jumps,
                                 bool markovian = false) {
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::bernoulli_distribution coin(0.5);
    const HermitianOperator h(random_traceless_hermitian(rng, d));
    std::vector<std::pair<double, Matrix>> terms;
    for (int j = 0; j < n_jumps; ++j) {
        double gamma = unif(rng);
        if (!markovian && coin(rng)) gamma = -gamma;
        terms.emplace_back(gamma, random_complex(rng, d));
    }
    return Superoperator::from_lindblad(h, terms);
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
    return max_abs(a - b) / (1.0 + std::max(max_abs(a), max_abs(b)));
}

}  // namespace canon::testutil
