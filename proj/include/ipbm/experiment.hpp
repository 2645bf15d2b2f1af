#pragma once

/**
 * @file experiment.hpp
 * @brief m-sweep experiment runner behind the command-line tool.
 *
 * Config files are flat `key = value` text; '#' starts a comment. Keys:
 *   domain       sphere | torus | stl:<path>
 *   solution     sin5 | mono123 | quintic | sin8-12-14 | sinsum | abs3 | sin5sum | zero
 *   operator     laplace | var-diag | var-full | weak | nonelliptic
 *   method       IPBF | IPBC
 *   space        tensor-product | type5
 *   d            degree on every axis (or dx, dy, dz separately)
 *   m_list       comma-separated grid sizes, e.g. 5,6,7,8
 *   nb, lambda, lambda_s, m_c, d_c, seed, eval_grid
 *   eval_boundary   boundary points added to the evaluation set (default 2000)
 *   box_quad, tet_quad   quadrature overrides (0 = automatic)
 *   solve_path   auto | dense | iterative
 *   dump_system  file prefix; writes <prefix>_m<M>.txt triplet dumps
 */

#include "ipbm/assembly.hpp"
#include "ipbm/geometry.hpp"
#include "ipbm/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ipbm {

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct ExperimentConfig {
    std::string domain = "sphere";
    std::string solution = "sin5";
    std::string op = "laplace";
    SolverConfig solver;
    std::vector<int> m_list{5, 6, 7, 8};
    int eval_grid = 40;
    int eval_boundary = 2000;
    SolvePath solve_path = SolvePath::automatic;
    std::string dump_system;

    /// Parses key = value lines; unknown keys and malformed values raise ConfigError.
    static ExperimentConfig parse(std::istream& in, const std::string& source = "<config>");
    static ExperimentConfig load(const std::string& path);

    /// Applies one `key=value` setting.
    void set(const std::string& key, const std::string& value);
    /// Throws ConfigError on an inconsistent configuration.
    void validate() const;
    /// Canonical `key = value` listing that parse() reads back to the same config.
    std::string echo() const;
};

/// Builds the domain named by a config value (sphere, torus, stl:<path>).
Domain load_domain(const std::string& spec);

struct ExperimentRow {
    int m = 0;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    int nc = 0;  ///< number of coefficients
    Eigen::Index rows = 0;
    double condition = 0.0;
    bool condition_exact = false;
    bool rank_deficient = false;
    bool converged = true;
    SolvePath path = SolvePath::dense;
    double residual = 0.0;
    ErrorSummary errors;
};

struct RateRow {
    int m_coarse = 0;
    int m_fine = 0;
    std::optional<double> max_rate;  ///< nullopt: exact (zero error)
    std::optional<double> rms_rate;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<ExperimentRow> rows;
    std::vector<RateRow> rates;
    std::size_t eval_count = 0;
    std::size_t boundary_count = 0;
    bool watertight = true;
    std::string ellipticity;
};

/// Runs the sweep; progress lines go to `log` when given.
ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Aligned text table. Timing columns are omitted when include_timing is false.
void write_report_text(const ExperimentReport& report, std::ostream& out, bool include_timing = true);
void write_report_csv(const ExperimentReport& report, std::ostream& out, bool include_timing = true);

/// Writes report.txt, report.csv and config.echo into `dir` (created if needed).
void write_report_files(const ExperimentReport& report, const std::string& dir);

struct PatchTestResult {
    bool pass = false;
    double emax = 0.0;
    double tolerance = 1e-9;
    ExperimentReport report;
};

/// Solves with a solution the space should reproduce; pass iff emax <= tolerance at every m.
PatchTestResult patch_test(const ExperimentConfig& config, double tolerance = 1e-9, std::ostream* log = nullptr);

}  // namespace ipbm
