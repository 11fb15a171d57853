#pragma once

// Run configuration: a flat INI file with one section per concern.
//
//   [run]        kind, output
//   [nfunction]  family, dim, table, and the family parameters
//   [domain]     shape = interval (a, b, n) | rectangle (lx, ly, nx, ny), max_nodes
//   [rhs]        kind = const | singular | sine | field, value, center, center_y,
//                exponent, file
//   [solver]     tol, eps_start, eps_end, eps_factor, armijo, max_halvings,
//                max_newton_per_level, picard_max_iter, picard_damping, picard_tol
//   [truncation] levels
//   [moser]      q, k_max, mu, branch, ladder_q, crit_k, cutoff_s
//   [verify]     field, bound
//   [suite]      entries, acceptance, jobs
//
// Unknown sections or keys, duplicates and unreadable paths are rejected.

#include "orlicz/solver.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orlicz {

enum class RunKind { check_nfunction, solve, truncate_sequence, moser_bound, verify, suite };

std::string_view run_kind_id(RunKind kind);
std::optional<RunKind> parse_run_kind(std::string_view id);

struct NFunctionSpec {
    std::string family;
    std::map<std::string, double> params;
    std::optional<std::filesystem::path> table;
    int dim = 0;
};

struct DomainSpec {
    std::string shape;
    double a = 0.0;
    double b = 1.0;
    int n = 0;
    double lx = 1.0;
    double ly = 1.0;
    int nx = 0;
    int ny = 0;
    std::size_t max_nodes = kDefaultMaxNodes;
    [[nodiscard]] int dimension() const { return shape == "interval" ? 1 : 2; }
};

struct RhsSpec {
    std::string kind = "const";
    double value = 1.0;
    double center = 0.0;
    double center_y = 0.0;
    double exponent = 0.0;
    std::optional<std::filesystem::path> file;
};

struct MoserSpec {
    double q = 0.0;
    int k_max = 30;
    std::optional<double> mu;
    IndexSelector branch = IndexSelector::ell;
    std::optional<double> ladder_q;
    double crit_k = 1.0;
    double cutoff_s = 1.0;
};

struct VerifySpec {
    std::filesystem::path field;
    std::filesystem::path bound;
};

struct SuiteSpec {
    std::vector<std::filesystem::path> entries;
    bool acceptance = true;
    int jobs = 4;
};

struct RunConfig {
    RunKind kind = RunKind::solve;
    std::filesystem::path source;
    std::optional<std::filesystem::path> output;
    std::optional<NFunctionSpec> nfunction;
    std::optional<DomainSpec> domain;
    std::optional<RhsSpec> rhs;
    SolverOptions solver;
    std::vector<int> levels{1, 2, 4, 8, 16};
    std::optional<MoserSpec> moser;
    std::optional<VerifySpec> verify;
    SuiteSpec suite;
};

/// Parses and validates a config file. Structural problems raise
/// ParseError, out-of-range values RangeError; messages name the key.
/// expected_kind, when given, must match [run] kind if that is present.
RunConfig parse_config(const std::filesystem::path& path, std::optional<RunKind> expected_kind = {});
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                            std::optional<RunKind> expected_kind = {});

NFunction build_nfunction(const NFunctionSpec& spec);
std::shared_ptr<const Mesh> build_mesh(const DomainSpec& spec);
ProblemSpec build_problem(const RunConfig& config, const std::shared_ptr<const Mesh>& mesh,
                          const NFunction& nf);

}  // namespace orlicz
