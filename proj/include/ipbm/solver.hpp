#pragma once

/**
 * @file solver.hpp
 * @brief Least-squares solves of H c = r, Gram-matrix conditioning, error summaries, rates.
 *
 * Small systems (n <= dense_limit) are solved by a Householder QR of the
 * stacked matrix H; the condition number of G = H'H is the squared ratio of
 * the extreme singular values of R. Larger systems run conjugate gradients on
 * the normal equations (CGLS, column-scaled) and report an estimated condition.
 */

#include "ipbm/assembly.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ipbm {

enum class SolvePath { automatic, dense, iterative };

std::string to_string(SolvePath p);

struct SolveOptions {
    SolvePath path = SolvePath::automatic;
    int dense_limit = 4000;            ///< automatic: dense QR for n <= dense_limit
    int exact_condition_limit = 3000;  ///< singular values of R for n <= this, estimates above
    double cg_tolerance = 1e-12;       ///< relative normal-equation residual
    int max_iterations = 0;            ///< 0 means 10 n
    bool compute_condition = true;
};

struct SolveResult {
    Eigen::VectorXd c;
    double residual_norm = 0.0;   ///< ||H c - r||_2, recomputed after the solve
    double gram_condition = 0.0;  ///< +inf when rank-deficient; NaN when not computed
    bool condition_exact = false;
    bool rank_deficient = false;  ///< c is then the minimum-norm solution (dense path)
    bool converged = true;
    int iterations = 0;
    SolvePath path = SolvePath::dense;
    double solve_seconds = 0.0;
};

SolveResult solve_least_squares(const LinearSystem& sys, const SolveOptions& options = {});

struct ConditionEstimate {
    double value = 0.0;  ///< cond_2(H'H); +inf when rank-deficient
    bool exact = false;
    bool rank_deficient = false;
};

ConditionEstimate gram_condition(const SparseRowMatrix& H, const SolveOptions& options = {});

/// cond_2(H'H) of the system matrix; +inf when numerically rank-deficient.
double condition_number(const LinearSystem& sys, const SolveOptions& options = {});

/// True when sigma_min(H) <= n * eps * sigma_max(H).
bool numerically_rank_deficient(double sigma_min, double sigma_max, Eigen::Index n);

struct ErrorSummary {
    double emax = 0.0;
    double rms = 0.0;
    std::size_t count = 0;
};

/// emax and rms of a list of pointwise errors.
ErrorSummary summarize_errors(const std::vector<double>& errors);

ErrorSummary evaluate_errors(const SplineSpace& space, const Eigen::VectorXd& c,
                             const std::function<double(const Point3&)>& u, const PointSet& pts);

/// ln(e_c / e_f) / ln(h_c / h_f) with h = 1 / (m - 1); nullopt when an error is exactly zero.
std::optional<double> convergence_rate(double e_coarse, double e_fine, int m_coarse, int m_fine);

}  // namespace ipbm
