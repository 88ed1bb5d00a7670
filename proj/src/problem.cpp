#include "canon/problem.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "canon/canonical.hpp"
#include "canon/dynamics.hpp"
#include "canon/haar.hpp"
#include "canon/perturbation.hpp"

namespace canon::cli {

using nlohmann::json;

namespace {

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CertificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

json apply_overrides(json doc, const RunOptions& opts) {
    for (const auto& [key, value] : opts.overrides) {
        std::string pointer = "/" + key;
        for (auto& c : pointer) {
            if (c == '.') c = '/';
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value;
        }
        doc[json::json_pointer(pointer)] = parsed;
    }
    if (opts.seed) doc["seed"] = *opts.seed;
    return doc;
}

json load_problem(const std::string& path, const RunOptions& opts, std::string& raw) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationFailure("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    raw = buf.str();
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::exception& e) {
        throw ValidationFailure(std::string("problem file is not valid JSON: ") + e.what());
    }
    return apply_overrides(std::move(doc), opts);
}

double tolerance_of(const json& problem, const std::string& name, double fallback) {
    if (problem.contains("tolerances") && problem["tolerances"].contains(name)) {
        return problem["tolerances"][name].get<double>();
    }
    return fallback;
}

std::uint64_t seed_of(const json& problem) {
    return problem.value("seed", std::uint64_t{1});
}

Superoperator build_generator(const json& problem, double hpta_tol) {
    if (problem.value("kind", "") != "generator") {
        throw ValidationFailure("task requires kind = \"generator\"");
    }
    if (!problem.contains("generator")) {
        throw ValidationFailure("missing \"generator\" block");
    }
    const json& g = problem["generator"];
    if (g.contains("rep")) {
        const Matrix rep = matrix_from_json(g["rep"]);
        const int d = static_cast<int>(std::llround(std::sqrt(double(rep.rows()))));
        if (Eigen::Index(d) * d != rep.rows() || rep.rows() != rep.cols()) {
            throw ValidationFailure("generator.rep must be a square d²×d² matrix");
        }
        Superoperator s(d, rep);
        const HptaDiagnostics diag = check_hpta(s, hpta_tol);
        if (!diag.ok) {
            throw HermiticityError(
                "generator is not HPTA: hermiticity residual " +
                std::to_string(diag.hermiticity_residual) + ", trace residual " +
                std::to_string(diag.trace_residual));
        }
        return s;
    }
    std::optional<HermitianOperator> h;
    if (g.contains("hamiltonian") && !g["hamiltonian"].is_null()) {
        h.emplace(matrix_from_json(g["hamiltonian"]));
    }
    std::vector<std::pair<double, Matrix>> terms;
    if (g.contains("jump_terms")) {
        for (const auto& term : g["jump_terms"]) {
            terms.emplace_back(term.at("gamma").get<double>(),
                               matrix_from_json(term.at("operator")));
        }
    }
    int d = h ? h->dim() : (terms.empty() ? 0 : static_cast<int>(terms.front().second.rows()));
    if (d == 0) throw ValidationFailure("generator block defines no operators");
    if (!h) h.emplace(Matrix::Zero(d, d));
    return Superoperator::from_lindblad(*h, terms);
}

BipartiteSystem build_bipartite(const json& problem) {
    if (problem.value("kind", "") != "bipartite") {
        throw ValidationFailure("task requires kind = \"bipartite\"");
    }
    if (!problem.contains("bipartite")) {
        throw ValidationFailure("missing \"bipartite\" block");
    }
    const json& b = problem["bipartite"];
    const int d_a = b.at("d_a").get<int>();
    const int d_b = b.at("d_b").get<int>();
    return BipartiteSystem(d_a, d_b, HermitianOperator(matrix_from_json(b.at("h_a_bare"))),
                           HermitianOperator(matrix_from_json(b.at("h_b_bare"))),
                           HermitianOperator(matrix_from_json(b.at("v"))),
                           b.at("lambda").get<double>(),
                           DensityOperator(matrix_from_json(b.at("rho_b0"))));
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw ValidationFailure("grid needs at least one point");
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int j = 0; j < n; ++j) out[j] = a + (b - a) * j / (n - 1);
    return out;
}

json with_tolerance(json value, double tol) {
    return json{{"value", std::move(value)}, {"certified_tolerance", tol}};
}

json task_canonicalize(const json& problem) {
    const double hpta_tol = tolerance_of(problem, "hpta_tol", 1e-8);
    const double rank_tol = tolerance_of(problem, "rank_tol", 1e-10);
    const double markov_tol = tolerance_of(problem, "markov_tol", 1e-9);
    const double recon_tol = tolerance_of(problem, "reconstruction_tol", 1e-9);
    const Superoperator s = build_generator(problem, hpta_tol);

    const CanonicalDecomposition dec = canonicalize(s, rank_tol, hpta_tol);
    const double recon = max_abs(dec.reassemble().rep() - s.rep()) / (1.0 + max_abs(s.rep()));
    if (recon > recon_tol) {
        throw CertificationFailure("reconstruction residual " + std::to_string(recon) +
                                   " exceeds tolerance " + std::to_string(recon_tol));
    }
    json jumps = json::array();
    for (const auto& [gamma, op] : dec.jump_terms) {
        jumps.push_back({{"gamma", gamma}, {"operator", matrix_to_json(op)}});
    }
    json outputs;
    outputs["canonical_hamiltonian"] = with_tolerance(matrix_to_json(dec.h.matrix()), 1e-10);
    outputs["jump_terms"] = with_tolerance(std::move(jumps), rank_tol);
    outputs["markovian"] = with_tolerance(markovianity_check(s, markov_tol), markov_tol);
    outputs["dissipator_avg_norm_squared"] =
        with_tolerance(avg_norm_squared(canonical_dissipator(s)), 1e-10);
    outputs["reconstruction_residual"] = with_tolerance(recon, recon_tol);
    return outputs;
}

json task_trajectory(const json& problem, const std::string& out_dir) {
    const json& task = problem.at("task");
    const double t_start = task.value("t_start", 0.0);
    const double t_end = task.at("t_end").get<double>();
    const int n_points = task.value("n_points", 101);
    const double cond_threshold = tolerance_of(problem, "cond_threshold", 1e8);

    const BipartiteSystem sys = build_bipartite(problem);
    const GeneratorTrajectory traj =
        canonical_trajectory(sys, linspace(t_start, t_end, n_points), cond_threshold);

    const int d = sys.dim_a();
    const std::string csv_path =
        (std::filesystem::path(out_dir) / "trajectory.csv").string();
    std::ofstream csv(csv_path);
    csv << std::setprecision(17);
    csv << "t,valid,cond";
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) csv << ",h_" << i << j << "_re,h_" << i << j << "_im";
    for (int j = 0; j < d * d; ++j) csv << ",gamma_" << j;
    csv << "\n";
    int n_valid = 0;
    for (const TrajectoryPoint& pt : traj.points) {
        csv << pt.t << "," << (pt.valid ? 1 : 0) << "," << pt.condition_number;
        Matrix h = Matrix::Zero(d, d);
        std::vector<double> gammas(static_cast<std::size_t>(d) * d, 0.0);
        if (pt.canonical) {
            h = pt.canonical->h.matrix();
            std::size_t j = 0;
            for (const auto& [gamma, op] : pt.canonical->jump_terms) gammas[j++] = gamma;
            std::sort(gammas.begin(), gammas.end(), std::greater<double>());
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) csv << "," << h(i, j).real() << "," << h(i, j).imag();
        for (double g : gammas) csv << "," << g;
        csv << "\n";
        if (pt.valid) ++n_valid;
    }
    json outputs;
    outputs["csv"] = csv_path;
    outputs["n_points"] = n_points;
    outputs["n_valid"] = n_valid;
    outputs["cond_threshold"] = cond_threshold;
    return outputs;
}

json task_perturb(const json& problem) {
    const json& task = problem.at("task");
    const int k_max = task.value("k_max", 2);
    const double t_max = task.value("t", 1.0);
    const double step = task.value("step", 1e-3);
    const int n_points = task.value("n_points", 5);
    const double h2_tol = tolerance_of(problem, "h2_tol", 1e-8);

    const BipartiteSystem sys = build_bipartite(problem);
    const std::vector<double> grid = linspace(0.0, t_max, n_points);
    const PerturbativeGenerator pg = recursive_generator(sys, k_max, grid, step);

    json outputs;
    const std::size_t last = grid.size() - 1;
    if (k_max >= 1) {
        outputs["h1"] = with_tolerance(
            matrix_to_json(canonical_hamiltonian(pg.terms[last][1]).matrix()), 1e-10);
    }
    if (k_max >= 2 && t_max > 0.0) {
        const HermitianOperator h2 = canonical_h2(sys, t_max, step);
        const HermitianOperator h2_proj = canonical_hamiltonian(closed_form_l2(sys, t_max, step));
        const double h2_residual = max_abs(h2.matrix() - h2_proj.matrix());
        outputs["h2"] = with_tolerance(matrix_to_json(h2.matrix()), h2_tol);
        outputs["h2_projection_residual"] = with_tolerance(h2_residual, h2_tol);
        if (h2_residual > h2_tol) {
            throw CertificationFailure("canonical H² closed form disagrees with projection by " +
                                       std::to_string(h2_residual));
        }
    }
    // Resummation quality against the exact generator at the system coupling.
    json residuals = json::array();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        try {
            auto [exact, diag] = extract_generator(sys, grid[j]);
            const Superoperator approx = pg.resummed(j, sys.lambda());
            residuals.push_back({{"t", grid[j]},
                                 {"residual", max_abs(exact.rep() - approx.rep())},
                                 {"valid", diag.valid}});
        } catch (const SingularityError&) {
            residuals.push_back({{"t", grid[j]}, {"residual", nullptr}, {"valid", false}});
        }
    }
    outputs["truncation_residuals"] = residuals;
    outputs["k_max"] = k_max;
    return outputs;
}

struct Certificate {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

std::vector<Certificate> verify_certificates(const json& problem) {
    const double hpta_tol = tolerance_of(problem, "hpta_tol", 1e-8);
    const double rank_tol = tolerance_of(problem, "rank_tol", 1e-10);
    const int trials = problem.contains("task") ? problem["task"].value("trials", 50) : 50;
    const Superoperator s = build_generator(problem, hpta_tol);
    const int d = s.dim();
    HaarSampler sampler(seed_of(problem), d);

    std::vector<Certificate> certs;
    const double scale = 1.0 + max_abs(s.rep());

    // Minimality (Pythagoras + orthogonality against random Φ_G).
    const MinimalityReport min_report = minimality_certificate(s, trials, sampler);
    certs.push_back({"minimality_pythagoras", min_report.max_pythagoras_residual <= 1e-8,
                     min_report.max_pythagoras_residual, 1e-8});
    certs.push_back({"minimality_orthogonality",
                     min_report.max_orthogonality_residual <= 1e-10,
                     min_report.max_orthogonality_residual, 1e-10});

    // Three-projection equivalence.
    const ProjectionReport proj = projection_equivalence(s);
    const double proj_scale = 1.0 + max_abs(proj.h_avg.matrix());
    certs.push_back({"projection_equivalence", proj.max_disagreement <= 1e-10 * proj_scale,
                     proj.max_disagreement / proj_scale, 1e-10});

    // Canonical decomposition reassembles the generator with traceless jumps.
    const CanonicalDecomposition dec = canonicalize(s, rank_tol, hpta_tol);
    const double recon = max_abs(dec.reassemble().rep() - s.rep()) / scale;
    certs.push_back({"reassembly", recon <= 1e-9, recon, 1e-9});
    double max_jump_trace = 0.0;
    for (const auto& [gamma, op] : dec.jump_terms) {
        max_jump_trace = std::max(max_jump_trace, std::abs(op.trace()));
    }
    certs.push_back({"traceless_jumps", max_jump_trace <= 1e-10, max_jump_trace, 1e-10});

    // Gauge invariance: random jump shifts leave the generator and its
    // canonical decomposition unchanged.
    {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<std::pair<double, Matrix>> shifted = dec.jump_terms;
        Matrix h_shifted = dec.h.matrix();
        for (auto& [gamma, op] : shifted) {
            const Complex alpha(gauss(sampler.engine()), gauss(sampler.engine()));
            op -= alpha * Matrix::Identity(d, d);
            h_shifted += (gamma / Complex(0.0, 2.0)) *
                         (alpha * (op + alpha * Matrix::Identity(d, d)).adjoint() -
                          std::conj(alpha) * (op + alpha * Matrix::Identity(d, d)));
        }
        const Superoperator s_shifted = Superoperator::from_lindblad(
            HermitianOperator(h_shifted, 1e-9), shifted);
        const double gen_residual = max_abs(s_shifted.rep() - s.rep()) / scale;
        certs.push_back({"gauge_invariance_generator", gen_residual <= 1e-12, gen_residual,
                         1e-12});
        const CanonicalDecomposition dec_shifted = canonicalize(s_shifted, rank_tol, hpta_tol);
        const double h_residual =
            max_abs(dec_shifted.h.matrix() - dec.h.matrix()) / proj_scale;
        certs.push_back({"gauge_invariance_canonical", h_residual <= 1e-10, h_residual, 1e-10});
    }

    // If the problem spells out a (H, jumps) presentation, certify that it is
    // already the canonical one.
    const json& g = problem["generator"];
    if (g.contains("hamiltonian") && !g["hamiltonian"].is_null()) {
        const Matrix given = matrix_from_json(g["hamiltonian"]);
        const Matrix given_traceless =
            given - (given.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
        const double h_diff = max_abs(given_traceless - dec.h.matrix()) / proj_scale;
        certs.push_back({"presentation_is_canonical", h_diff <= 1e-10, h_diff, 1e-10});
    }
    return certs;
}

void write_result(const std::string& out_dir, const json& doc, std::ostream& out) {
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / "result.json").string();
    std::ofstream file(path, std::ios::binary);
    file << doc.dump(2) << "\n";
    out << doc.dump(2) << "\n";
}

}  // namespace

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationFailure("matrix must be a nonempty array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw ValidationFailure("matrix rows must have equal length");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            const json& entry = j[i][k];
            if (!entry.is_array() || entry.size() != 2) {
                throw ValidationFailure("matrix entries must be [re, im] pairs");
            }
            m(i, k) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

int run(const std::string& path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    std::string raw;
    json problem;
    try {
        problem = load_problem(path, opts, raw);
    } catch (const ValidationFailure& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    json result;
    result["schema_version"] = problem.value("schema_version", "1.0");
    result["input_hash"] = fnv1a_hex(raw);
    try {
        const std::string name = problem.at("task").at("name").get<std::string>();
        result["task"] = name;
        if (problem.contains("tolerances")) result["tolerances"] = problem["tolerances"];
        if (name == "canonicalize") {
            result["outputs"] = task_canonicalize(problem);
        } else if (name == "trajectory") {
            std::filesystem::create_directories(opts.out_dir);
            result["outputs"] = task_trajectory(problem, opts.out_dir);
        } else if (name == "perturb") {
            result["outputs"] = task_perturb(problem);
        } else if (name == "verify") {
            return verify(path, opts, out, err);
        } else if (name == "haar-check") {
            const json& task = problem["task"];
            return haar_check(task.value("d", 2), task.value("samples", 100000),
                              seed_of(problem), out, err);
        } else {
            err << "validation error: unknown task \"" << name << "\"\n";
            return kExitValidation;
        }
    } catch (const CertificationFailure& e) {
        err << "certification failure: " << e.what() << "\n";
        return kExitCertification;
    } catch (const ValidationFailure& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DimensionError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const HermiticityError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const PositivityError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SingularityError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    write_result(opts.out_dir, result, out);
    return kExitOk;
}

int verify(const std::string& path, const RunOptions& opts, std::ostream& out,
           std::ostream& err) {
    std::string raw;
    json problem;
    try {
        problem = load_problem(path, opts, raw);
    } catch (const ValidationFailure& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        const std::vector<Certificate> certs = verify_certificates(problem);
        json report = json::array();
        bool all_pass = true;
        for (const Certificate& c : certs) {
            out << "certificate " << c.name << ": " << (c.pass ? "PASS" : "FAIL")
                << " (residual " << c.residual << ", tolerance " << c.tolerance << ")\n";
            report.push_back({{"name", c.name},
                              {"pass", c.pass},
                              {"residual", c.residual},
                              {"tolerance", c.tolerance}});
            all_pass = all_pass && c.pass;
        }
        json result;
        result["schema_version"] = problem.value("schema_version", "1.0");
        result["input_hash"] = fnv1a_hex(raw);
        result["task"] = "verify";
        result["certificates"] = report;
        result["pass"] = all_pass;
        write_result(opts.out_dir, result, out);
        return all_pass ? kExitOk : kExitCertification;
    } catch (const ValidationFailure& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const json::exception& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DimensionError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const HermiticityError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SingularityError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int haar_check(int d, int n_samples, std::uint64_t seed, std::ostream& out, std::ostream& err) {
    try {
        bool all_pass = true;
        auto report = [&](const std::string& name, bool pass, double residual) {
            out << "haar-check " << name << ": " << (pass ? "PASS" : "FAIL") << " (residual "
                << residual << ")\n";
            all_pass = all_pass && pass;
        };

        const double moment_diff =
            max_abs(pair_average_symmetric(d) - pair_average_permutation(d));
        report("fourth_moment_agreement", moment_diff <= 1e-12, moment_diff);

        HaarSampler sampler(seed, d);
        double unitarity = 0.0;
        const int n_unitarity = std::min(n_samples, 100);
        for (int j = 0; j < n_unitarity; ++j) {
            const Matrix u = sampler.sample_unitary();
            unitarity = std::max(
                unitarity, max_abs(u.adjoint() * u - Matrix::Identity(d, d)));
        }
        report("unitarity", unitarity <= 1e-10, unitarity);

        Matrix probe = Matrix::Zero(d, d);
        for (int j = 0; j < d; ++j) probe(j, j) = j + 1;
        HaarSampler mc_sampler(seed, d);
        const MatrixEstimate est = mc_average_matrix(
            mc_sampler, n_samples,
            [&](const Matrix& u) -> Matrix { return u.adjoint() * probe * u; });
        const Matrix exact = second_moment(probe);
        double max_sigma = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double dev = std::abs(est.mean(i, j) - exact(i, j));
                const double se = est.std_error(i, j) + 1e-300;
                max_sigma = std::max(max_sigma, dev / se);
            }
        report("second_moment_mc_4sigma", max_sigma <= 4.0, max_sigma);

        HaarSampler s1(seed, d), s2(seed, d);
        bool identical = true;
        for (int j = 0; j < 3; ++j) {
            const Matrix a = s1.sample_unitary();
            const Matrix b = s2.sample_unitary();
            identical = identical && (a.array() == b.array()).all();
        }
        report("seeded_determinism", identical, identical ? 0.0 : 1.0);

        return all_pass ? kExitOk : kExitCertification;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace canon::cli
