// problem.hpp — Batch front end: problem files in, result documents out.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "canon/operator_core.hpp"

namespace canon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCertification = 4;

struct RunOptions {
    std::vector<std::pair<std::string, std::string>> overrides;  // dotted.key=value
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

// Execute the task named in the problem file; write result.json (and
// trajectory.csv for trajectory tasks) under out_dir.
int run(const std::string& path, const RunOptions& opts, std::ostream& out, std::ostream& err);

// Theorem-1 certificate suite: minimality, projection equivalence, gauge
// invariance, traceless jumps. Exit 0 iff all certificates pass.
int verify(const std::string& path, const RunOptions& opts, std::ostream& out,
           std::ostream& err);

// Standalone Haar-moment agreement suite.
int haar_check(int d, int n_samples, std::uint64_t seed, std::ostream& out,
               std::ostream& err);

// Matrices on the wire are nested arrays of [re, im] pairs.
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace canon::cli
