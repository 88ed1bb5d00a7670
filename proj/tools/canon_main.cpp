#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canon/problem.hpp"

int main(int argc, char** argv) {
    CLI::App app{"canon — canonical Hamiltonian / minimal dissipator toolkit"};
    app.require_subcommand(1);

    std::string problem_path;
    std::vector<std::string> overrides;
    canon::cli::RunOptions opts;
    std::uint64_t seed_value = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "execute the task in a problem file");
    run_cmd->add_option("file", problem_path, "problem file (JSON)")->required();
    run_cmd->add_option("--set", overrides, "override a problem key, dotted.key=value");
    run_cmd->add_option("--out", opts.out_dir, "output directory");
    CLI::Option* run_seed = run_cmd->add_option("--seed", seed_value, "override the RNG seed");

    std::string verify_path;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the decomposition certificate suite");
    verify_cmd->add_option("file", verify_path, "problem file (JSON)")->required();

    int d = 2;
    int samples = 100000;
    std::uint64_t haar_seed = 1;
    CLI::App* haar_cmd = app.add_subcommand("haar-check", "Haar moment self-tests");
    haar_cmd->add_option("--d", d, "Hilbert-space dimension")->required();
    haar_cmd->add_option("--samples", samples, "Monte Carlo sample count")->required();
    haar_cmd->add_option("--seed", haar_seed, "RNG seed")->required();

    CLI11_PARSE(app, argc, argv);

    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "validation error: --set expects key=value, got \"" << kv << "\"\n";
            return canon::cli::kExitValidation;
        }
        opts.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (*run_seed) opts.seed = seed_value;

    if (run_cmd->parsed()) {
        return canon::cli::run(problem_path, opts, std::cout, std::cerr);
    }
    if (verify_cmd->parsed()) {
        return canon::cli::verify(verify_path, canon::cli::RunOptions{}, std::cout, std::cerr);
    }
    return canon::cli::haar_check(d, samples, haar_seed, std::cout, std::cerr);
}
