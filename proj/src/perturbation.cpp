#include "canon/perturbation.hpp"

#include <cmath>

namespace canon {

namespace {

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix lift_a(const Matrix& op_a, int d_b) {
    return tensor_product(op_a, Matrix::Identity(d_b, d_b));
}

Matrix lift_b(const Matrix& op_b, int d_a) {
    return tensor_product(Matrix::Identity(d_a, d_a), op_b);
}

// Ṽ(t) = e^{−iH₀t} (∫₀ᵗ V_int(s) ds) e^{iH₀t} = ∫_{−t}^0 V_int(u) du.
// The back-rotation must use the full free Hamiltonian H₀, not just h_A:
// only then does the double-commutator closed form reproduce the recursion.
Matrix v_tilde_matrix(const BipartiteSystem& sys, double t, double step);

Matrix v_int_matrix(const BipartiteSystem& sys, double t) {
    const Matrix f = sys.free_propagator(t);
    return f.adjoint() * sys.v().matrix() * f;
}

// ∫₀ᵗ V_int(s) ds by composite Simpson with step ≈ `step`.
Matrix integrated_v_int(const BipartiteSystem& sys, double t, double step) {
    const int d = sys.dim_a() * sys.dim_b();
    if (t == 0.0) return Matrix::Zero(d, d);
    int n = static_cast<int>(std::ceil(std::abs(t) / step));
    n = std::max(2, n + (n % 2));
    const double h = t / n;
    Matrix sum = v_int_matrix(sys, 0.0) + v_int_matrix(sys, t);
    for (int j = 1; j < n; ++j) {
        sum += ((j % 2 == 1) ? 4.0 : 2.0) * v_int_matrix(sys, j * h);
    }
    return (h / 3.0) * sum;
}

Matrix v_tilde_matrix(const BipartiteSystem& sys, double t, double step) {
    const Matrix f = sys.free_propagator(t);
    return f * integrated_v_int(sys, t, step) * f.adjoint();
}

}  // namespace

HermitianOperator v_interaction(const BipartiteSystem& sys, double t) {
    return HermitianOperator(v_int_matrix(sys, t), 1e-9);
}

DysonTerms DysonTerms::compute(const BipartiteSystem& sys, int k_max,
                               const std::vector<double>& grid, double step) {
    if (k_max < 0) throw std::invalid_argument("DysonTerms: k_max must be >= 0");
    if (step <= 0.0) throw std::invalid_argument("DysonTerms: step must be positive");
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        if (grid[j + 1] <= grid[j]) {
            throw std::invalid_argument("DysonTerms: grid must be strictly increasing");
        }
    }
    if (!grid.empty() && grid.front() < 0.0) {
        throw std::invalid_argument("DysonTerms: grid must start at t >= 0");
    }

    const int d = sys.dim_a() * sys.dim_b();
    DysonTerms out;
    out.k_max_ = k_max;
    out.grid_ = grid;
    out.terms_.reserve(grid.size());

    std::vector<Matrix> u(static_cast<std::size_t>(k_max) + 1, Matrix::Zero(d, d));
    u[0] = Matrix::Identity(d, d);

    auto derivative = [&](double t, const std::vector<Matrix>& state) {
        std::vector<Matrix> du(state.size(), Matrix::Zero(d, d));
        if (k_max >= 1) {
            const Matrix vint = v_int_matrix(sys, t);
            for (int k = 1; k <= k_max; ++k) du[k] = -kImag * vint * state[k - 1];
        }
        return du;
    };

    auto rk4_step = [&](double t, double h, std::vector<Matrix>& state) {
        const auto k1 = derivative(t, state);
        std::vector<Matrix> tmp(state.size());
        for (std::size_t j = 0; j < state.size(); ++j) tmp[j] = state[j] + 0.5 * h * k1[j];
        const auto k2 = derivative(t + 0.5 * h, tmp);
        for (std::size_t j = 0; j < state.size(); ++j) tmp[j] = state[j] + 0.5 * h * k2[j];
        const auto k3 = derivative(t + 0.5 * h, tmp);
        for (std::size_t j = 0; j < state.size(); ++j) tmp[j] = state[j] + h * k3[j];
        const auto k4 = derivative(t + h, tmp);
        for (std::size_t j = 0; j < state.size(); ++j) {
            state[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    };

    double t_now = 0.0;
    for (double t_target : grid) {
        const double span = t_target - t_now;
        if (span > 0.0) {
            const int n_sub = std::max(1, static_cast<int>(std::ceil(span / step)));
            const double h = span / n_sub;
            for (int j = 0; j < n_sub; ++j) rk4_step(t_now + j * h, h, u);
            t_now = t_target;
        }
        out.terms_.push_back(u);
    }
    return out;
}

const Matrix& DysonTerms::term(int k, std::size_t grid_index) const {
    if (k < 0 || k > k_max_) throw std::out_of_range("DysonTerms::term: order out of range");
    return terms_.at(grid_index)[static_cast<std::size_t>(k)];
}

std::size_t DysonTerms::grid_index(double t) const {
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        if (std::abs(grid_[j] - t) <= 1e-12 * (1.0 + std::abs(t))) return j;
    }
    throw std::invalid_argument("DysonTerms: time " + std::to_string(t) + " not on grid");
}

Superoperator perturbative_channel(const BipartiteSystem& sys, const DysonTerms& dyson,
                                   int k, double t) {
    if (k < 0 || k > dyson.k_max()) throw std::out_of_range("perturbative_channel: k out of range");
    const std::size_t idx = dyson.grid_index(t);
    const int d_a = sys.dim_a();
    const int d_b = sys.dim_b();
    const Matrix ua = sys.a_propagator(t);
    const Matrix& rho_b = sys.rho_b0().matrix();
    return Superoperator::from_action(d_a, [&](const Matrix& m) {
        const Matrix x = tensor_product(m, rho_b);
        Matrix s = Matrix::Zero(d_a * d_b, d_a * d_b);
        for (int mm = 0; mm <= k; ++mm) {
            s += dyson.term(mm, idx) * x * dyson.term(k - mm, idx).adjoint();
        }
        return (ua * partial_trace(s, Subsystem::B, d_a, d_b) * ua.adjoint()).eval();
    });
}

Superoperator perturbative_channel_derivative(const BipartiteSystem& sys,
                                              const DysonTerms& dyson, int k, double t) {
    if (k < 0 || k > dyson.k_max()) {
        throw std::out_of_range("perturbative_channel_derivative: k out of range");
    }
    const std::size_t idx = dyson.grid_index(t);
    const int d_a = sys.dim_a();
    const int d_b = sys.dim_b();
    const Matrix ua = sys.a_propagator(t);
    const Matrix& h_a = sys.h_a_bare().matrix();
    const Matrix& rho_b = sys.rho_b0().matrix();
    const Matrix vint = v_int_matrix(sys, t);
    const Superoperator n_k = perturbative_channel(sys, dyson, k, t);
    return Superoperator::from_action(d_a, [&](const Matrix& m) {
        const Matrix x = tensor_product(m, rho_b);
        Matrix s_dot = Matrix::Zero(d_a * d_b, d_a * d_b);
        for (int mm = 0; mm <= k; ++mm) {
            if (mm >= 1) {
                s_dot += (-kImag * vint * dyson.term(mm - 1, idx)) * x *
                         dyson.term(k - mm, idx).adjoint();
            }
            if (k - mm >= 1) {
                s_dot += dyson.term(mm, idx) * x *
                         (-kImag * vint * dyson.term(k - mm - 1, idx)).adjoint();
            }
        }
        const Matrix n_of_m = n_k.apply(m);
        return (-kImag * commutator(h_a, n_of_m) +
                ua * partial_trace(s_dot, Subsystem::B, d_a, d_b) * ua.adjoint())
            .eval();
    });
}

Superoperator PerturbativeGenerator::resummed(std::size_t grid_index, double lambda) const {
    Superoperator sum = terms.at(grid_index)[0];
    double coeff = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        coeff *= lambda;
        sum = sum + coeff * terms[grid_index][static_cast<std::size_t>(k)];
    }
    return sum;
}

PerturbativeGenerator recursive_generator(const BipartiteSystem& sys, int k_max,
                                          const std::vector<double>& grid, double step) {
    const DysonTerms dyson = DysonTerms::compute(sys, k_max, grid, step);
    const int d_a = sys.dim_a();
    const Superoperator l0 = Superoperator::from_hamiltonian(sys.h_a_bare());

    PerturbativeGenerator out;
    out.k_max = k_max;
    out.grid = grid;
    out.terms.reserve(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const double t = grid[idx];
        // rep of M ↦ R M R† with R = e^{+i h_A t}
        const Matrix r = sys.a_propagator(-t);
        const Matrix rot = tensor_product(r.conjugate(), r);

        std::vector<Superoperator> orders;
        orders.reserve(static_cast<std::size_t>(k_max) + 1);
        orders.push_back(l0);
        for (int k = 1; k <= k_max; ++k) {
            Matrix rep = perturbative_channel_derivative(sys, dyson, k, t).rep();
            for (int m = 0; m < k; ++m) {
                rep -= orders[static_cast<std::size_t>(m)].rep() *
                       perturbative_channel(sys, dyson, k - m, t).rep();
            }
            orders.emplace_back(d_a, (rep * rot).eval());
        }
        out.terms.push_back(std::move(orders));
    }
    return out;
}

Superoperator closed_form_l2(const BipartiteSystem& sys, double t, double step) {
    const int d_a = sys.dim_a();
    const int d_b = sys.dim_b();
    const Matrix& v = sys.v().matrix();
    const Matrix& rho_b = sys.rho_b0().matrix();
    const Matrix v_tilde = v_tilde_matrix(sys, t, step);
    const Matrix v_hat = partial_trace(v * lift_b(rho_b, d_a), Subsystem::B, d_a, d_b);
    const Matrix outer_op = v - lift_a(v_hat, d_b);
    return Superoperator::from_action(d_a, [&](const Matrix& m) {
        const Matrix inner = commutator(tensor_product(m, rho_b), v_tilde);
        return partial_trace(commutator(outer_op, inner), Subsystem::B, d_a, d_b);
    });
}

HermitianOperator canonical_h2(const BipartiteSystem& sys, double t, double step) {
    const int d_a = sys.dim_a();
    const int d_b = sys.dim_b();
    const Matrix& v = sys.v().matrix();
    const Matrix& rho_b = sys.rho_b0().matrix();
    const Matrix v_tilde = v_tilde_matrix(sys, t, step);

    const Matrix v_hat = partial_trace(v * lift_b(rho_b, d_a), Subsystem::B, d_a, d_b);
    const Matrix v_b = partial_trace(v, Subsystem::A, d_a, d_b);
    const Matrix v_tilde_b = partial_trace(v_tilde, Subsystem::A, d_a, d_b);

    const Complex inv_2i = 1.0 / Complex(0.0, 2.0);
    const Complex inv_2id = inv_2i / static_cast<double>(d_a);

    Matrix h = inv_2id * partial_trace(v_tilde * lift_b(commutator(v_b, rho_b), d_a),
                                       Subsystem::B, d_a, d_b);
    h += inv_2id * partial_trace(v * lift_b(commutator(v_tilde_b, rho_b), d_a),
                                 Subsystem::B, d_a, d_b);
    h += inv_2i * partial_trace(commutator(v, v_tilde) * lift_b(rho_b, d_a),
                                Subsystem::B, d_a, d_b);
    const Matrix tr_vt_rho = partial_trace(v_tilde * lift_b(rho_b, d_a), Subsystem::B, d_a, d_b);
    h += inv_2i * commutator(tr_vt_rho, v_hat);

    h -= (h.trace() / static_cast<double>(d_a)) * Matrix::Identity(d_a, d_a);
    return HermitianOperator(0.5 * (h + h.adjoint().eval()), 1e-6);
}

}  // namespace canon
