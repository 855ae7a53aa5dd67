#pragma once

#include <optional>
#include <vector>

#include "stlverify/set_ops.hpp"

namespace stlverify {

/// Continuous-time LTI system x' = A x + B u. m = 0 inputs is allowed.
struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;

    LinearSystem() = default;
    LinearSystem(Eigen::MatrixXd A_, Eigen::MatrixXd B_);

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
};

struct ReachParams {
    double dt = 0.0;
    double t_end = 0.0;
    int kappa = 2;

    int num_steps() const;
    void validate() const;
};

/// e^{A dt} at machine precision (scaling and squaring).
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A, double dt = 1.0);

/// Interval remainder [-E, E] of the order-kappa Taylor series,
/// E = e^{|A| dt} - sum_{j<=kappa} (|A| dt)^j / j!. Throws OverflowError when
/// ||A|| dt is too large to evaluate.
IntervalMatrix exp_remainder(const Eigen::MatrixXd& A, double dt, int kappa);

/// Propagation matrix for constant inputs, T = integral_0^dt e^{A s} ds.
/// Equals A^{-1}(e^{A dt} - I) for invertible A; evaluated by a scaled power
/// series so singular A needs no special casing.
Eigen::MatrixXd propagation_matrix(const Eigen::MatrixXd& A, double dt);

/// Interval Taylor sum T^(o) = sum_{j=2..o} [(j^{-j/(j-1)} - j^{-1/(j-1)}) dt^j, 0] A^{j-1}/j!.
IntervalMatrix taylor_interval_sum(const Eigen::MatrixXd& A, double dt, int order);

struct CurvatureMatrices {
    IntervalMatrix F;        // T^(kappa) A + E
    IntervalMatrix G;        // T^(kappa+1) + E dt
    IntervalMatrix T_kappa;  // exposed for truncation-order tuning
    IntervalMatrix T_kappa1;
};

CurvatureMatrices curvature_matrices(const Eigen::MatrixXd& A, double dt, int kappa);

/// Enclosure of the difference between the reachable sets under constant and
/// time-varying inputs over one step; U0 must be centered at the origin.
Zonotope input_difference_bloat(const Eigen::MatrixXd& A, double dt, int kappa,
                                const Zonotope& U0);

/// Generator provenance per step: H/K partition the columns of R(t_i) into
/// initial-state/input columns and uncertainty columns; N/M do the same for
/// R(tau_i).
struct FactorIndexTuples {
    std::vector<std::vector<int>> H, K;  // per time point i = 0..N
    std::vector<std::vector<int>> N, M;  // per interval i = 0..N-1
};

/// Alternating sequence of time-point and time-interval reachable sets plus
/// everything needed to evaluate the factor-to-state dependency map.
struct ReachSequence {
    std::vector<Zonotope> Rt;    // R(t_i), i = 0..N
    std::vector<Zonotope> Rtau;  // R(tau_i), i = 0..N-1
    FactorIndexTuples tuples;

    int gamma_x = 0;
    int gamma_u = 0;
    double dt = 0.0;
    double t_end = 0.0;

    // intermediate sets kept for diagnostics and tests
    std::vector<Zonotope> H, Pc, D, C;

    int num_steps() const { return static_cast<int>(Rtau.size()); }
    int factor_dim() const { return gamma_x + gamma_u * num_steps(); }
};

/// Alg.-1 style reachability with a constant input set.
ReachSequence reach_sequence(const LinearSystem& sys, const Zonotope& X0, const Zonotope& U,
                             const ReachParams& params);

/// Same with one input set per step (size num_steps, uniform generator count).
ReachSequence reach_sequence(const LinearSystem& sys, const Zonotope& X0,
                             const std::vector<Zonotope>& U_steps, const ReachParams& params);

struct DependencyEval {
    Eigen::VectorXd mu;  // approximate solution for the given factors
    Zonotope error;      // guaranteed error bound, mu + error subset of R(t)
};

/// Evaluates the dependency map of the sequence at time t for factor vector
/// alpha in [-1,1]^factor_dim. Selects the time-point form when t is a grid
/// multiple and the time-interval form otherwise.
DependencyEval dependency_eval(const ReachSequence& seq, double t, const Eigen::VectorXd& alpha);

} // namespace stlverify
