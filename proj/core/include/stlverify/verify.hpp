#pragma once

#include <optional>

#include "stlverify/milp.hpp"

namespace stlverify {

enum class VerdictResult { Safe, Unsafe, Unknown };

const char* to_string(VerdictResult r);

struct VerifierConfig {
    int max_iterations = 12;
    long milp_node_cap = 200000;
    int polytope_cap = 10000;
    double epsilon = 1e-6;   // strictness tolerance of the counterexample MILP
    double dt_init = 0.0;    // 0: start from the formula horizon
    int kappa_cap = 100;
    bool run_wholeset_baseline = false;
    bool falsify_only = false;  // skip the safe check, search counterexamples only
};

struct IterationDiag {
    double dt = 0.0;
    int kappa = 0;
    bool reach_ok = false;
    std::size_t unsafe_polytopes = 0;      // |L| for phi
    std::size_t safe_polytopes = 0;        // |L| for !phi
    std::optional<bool> wholeset_entailed; // baseline verdict, when requested
    std::string note;
};

struct Verdict {
    VerdictResult result = VerdictResult::Unknown;
    int iterations = 0;
    double dt_final = 0.0;
    int kappa_final = 0;
    std::optional<SampledTrace> counterexample;
    std::optional<Eigen::VectorXd> counterexample_alpha;
    UnsafeList unsafe_factors;  // last nonempty L(phi), empty on safe
    std::vector<IterationDiag> diags;
};

/// Input uncertainty: either one constant set or a piecewise-constant list on
/// its own grid (resampled to each verification time step).
struct InputSpec {
    Zonotope constant;                  // used when steps is empty
    std::vector<Zonotope> steps;
    double step_dt = 0.0;               // grid of `steps`

    bool time_varying() const { return !steps.empty(); }
    static InputSpec constant_set(Zonotope U);
    static InputSpec piecewise(std::vector<Zonotope> sets, double dt);

    /// One input set per reach step of size dt over N steps; `exact` reports
    /// whether every reach step lies inside a single original piece (when it
    /// does not, a convex-hull enclosure is used and counterexample search is
    /// suppressed).
    std::vector<Zonotope> resample(double dt, int num_steps, bool* exact) const;
};

/// Smallest truncation order kappa >= 2 with
/// 1 - ||T^(kappa)||_F / ||T^(kappa+1)||_F <= 1e-10. Throws CapError beyond
/// the cap.
int tune_truncation_order(const Eigen::MatrixXd& A, double dt, int cap = 100);

/// Automated verification loop: starts at dt = horizon, halves dt each round,
/// returns `safe` when the factor-space model check of phi is empty, `unsafe`
/// when a monitor-validated counterexample exists, `unknown` after
/// max_iterations.
Verdict verify(const LinearSystem& sys, const Zonotope& X0, const InputSpec& U,
               const StlPtr& phi, const VerifierConfig& cfg = {});

/// Exact discrete trajectory induced by a factor vector: x(0) = c_x + G_x a_x
/// and x(t_{i+1}) = e^{A dt} x(t_i) + T B (c_u + G_u a_{u,i+1}).
SampledTrace counterexample_trajectory(const LinearSystem& sys, const Zonotope& X0,
                                       const std::vector<Zonotope>& U_steps,
                                       const Eigen::VectorXd& alpha, double dt, double t_end);

struct Prediction {
    UnsafeList legal_factors;  // factors that potentially satisfy phi
    ReachSequence reach;
};

/// One model-check pass for the negated specification at fixed parameters;
/// the returned polytopes describe all potentially-legal behaviors (set-based
/// prediction).
Prediction predict_safe_behaviors(const LinearSystem& sys, const Zonotope& X0,
                                  const InputSpec& U, const StlPtr& phi, double dt, int kappa,
                                  const ModelCheckOptions& opts = {});

} // namespace stlverify
