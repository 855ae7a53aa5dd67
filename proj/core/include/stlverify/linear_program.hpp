#pragma once

#include <Eigen/Dense>
#include <limits>

#include "stlverify/errors.hpp"

namespace stlverify {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense linear program
///
///   min  c' x   subject to   A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi.
///
/// Bounds may be +-infinity. Empty constraint blocks are allowed.
struct LinearProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd A_ub;
    Eigen::VectorXd b_ub;
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    /// Feasibility problem (zero objective) for A x <= b with free variables.
    static LinearProgram feasibility(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

    int num_vars() const { return static_cast<int>(c.size()); }

    /// Throws DimensionError if the blocks are inconsistent.
    void validate() const;

    /// All constraints (rows, equalities split, finite bounds) stacked as a
    /// single inequality system A x <= b; used for infeasibility certificates.
    void stacked_inequalities(Eigen::MatrixXd& A, Eigen::VectorXd& b) const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;       // valid when Optimal
    double objective = 0.0;  // valid when Optimal
    /// Farkas certificate over stacked_inequalities(): y >= 0, y'A = 0,
    /// y'b < 0. Only filled when infeasible and requested.
    Eigen::VectorXd farkas;
};

struct LpOptions {
    double tol = 1e-9;
    long max_iters = 0;  // 0: derived from problem size
    bool want_certificate = false;
};

/// Two-phase dense simplex with Bland's rule (cycle-free). Throws LpError on
/// numerical failure (iteration cap); infeasible/unbounded are reported in
/// the result, not thrown.
LpResult lp_solve(const LinearProgram& lp, const LpOptions& opts = {});

} // namespace stlverify
