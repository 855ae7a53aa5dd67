#pragma once

#include "stlverify/model_check.hpp"

namespace stlverify {

/// Mixed-integer program deciding whether some factor vector lies outside
/// every safe polytope: per polytope j one binary row choice lambda_jk with
/// sum_k lambda_jk = 1, disaggregated copies alpha_jk in [-lambda, lambda]^p
/// with alpha = sum_k alpha_jk, and the chosen row strictly violated,
/// C_j(k,.) alpha_jk >= lambda_jk (d_j(k) + epsilon). Objective min ||alpha||_1.
struct CounterexampleMilp {
    int p = 0;
    std::vector<Polytope> safe_sets;
    double epsilon = 1e-6;

    /// Violation margins C_j(k,.) alpha - d_j(k) for the chosen rows.
    Eigen::VectorXd margins(const Eigen::VectorXd& alpha, const std::vector<int>& rows) const;
    /// Direct substitution check of the constraints at an integral solution.
    bool validate(const Eigen::VectorXd& alpha, const std::vector<int>& rows,
                  double tol = 1e-9) const;
};

struct MilpOptions {
    long node_cap = 200000;
    double epsilon = 1e-6;
    double lp_tol = 1e-9;
};

enum class MilpStatus { Feasible, Infeasible, NodeCapExceeded };

struct MilpResult {
    MilpStatus status = MilpStatus::Infeasible;
    Eigen::VectorXd alpha;
    double objective = 0.0;
    std::vector<int> chosen_rows;  // one violated row index per polytope
    long nodes = 0;
};

/// Exact branch-and-bound over the binary row choices (depth-first in list
/// order, children ordered by relaxation violation, best-bound pruning).
MilpResult milp_branch_and_bound(const CounterexampleMilp& milp, const MilpOptions& opts = {});

/// Eq.-26 entry point: searches for alpha in [-1,1]^p outside every polytope
/// of `safe`. Factor-box rows are dropped from the encoding (they cannot be
/// violated inside the box); a polytope left without rows covers the whole
/// box and makes the search infeasible. An empty list yields alpha = 0.
MilpResult find_counterexample(const UnsafeList& safe, int p, const MilpOptions& opts = {});

} // namespace stlverify
