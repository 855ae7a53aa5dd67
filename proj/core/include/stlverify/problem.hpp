#pragma once

#include <nlohmann/json_fwd.hpp>

#include "stlverify/verify.hpp"

namespace stlverify {

/// A self-contained verification problem: dynamics, uncertainty sets, and the
/// specification text.
struct ProblemFile {
    std::string name;
    LinearSystem sys;
    Zonotope X0;
    InputSpec input;
    std::string spec_text;

    StlPtr parse_spec() const { return parse_stl(spec_text); }
};

/// Closed-loop tracking arrangement: the plant follows a reference trajectory
/// driven by a piecewise-constant input sequence through static feedback
/// u = u_ref + K (x - x_ref). The assembled system stacks plant and
/// reference states.
struct ClosedLoopSpec {
    Eigen::MatrixXd A;  // plant
    Eigen::MatrixXd B;
    Eigen::MatrixXd K;  // feedback gain, m x n
    Zonotope X0_plant;
    Eigen::VectorXd xref0;
    double uref_dt = 0.0;
    std::vector<Eigen::VectorXd> uref;     // piecewise-constant reference inputs
    Eigen::VectorXd w_radius;              // disturbance box radius, size m
};

/// Stacked dynamics [[A+BK, -BK],[0, A]] with inputs [u_ref; w].
ProblemFile assemble_closed_loop(const ClosedLoopSpec& spec, const std::string& name,
                                 const std::string& spec_text);

ProblemFile problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemFile& p);

/// Loads and fully validates a problem file; errors name the offending field.
ProblemFile load_problem(const std::string& path);
void save_problem(const ProblemFile& p, const std::string& path);

/// Built-in benchmark generators (double_integrator, rotation, heat1d, robot,
/// traffic and their variants). Parameters are generator-specific; common
/// keys: "variant" (safe|unsafe), "N" (heat1d size).
ProblemFile generate_benchmark(const std::string& name, const nlohmann::json& params);

/// Names accepted by generate_benchmark.
std::vector<std::string> benchmark_names();

// --- result emission ---------------------------------------------------------

nlohmann::json verdict_to_json(const Verdict& v, double wall_time_ms);

/// Per-step interval projections and 2-D polygon shadows of a reach sequence
/// (projection dimensions are 0-based).
nlohmann::json reach_to_json(const ReachSequence& seq, int proj_x, int proj_y);

/// Per-interval occupancy: the reachable zonotope plus the factor polytopes of
/// potentially-legal behaviors.
nlohmann::json occupancy_to_json(const Prediction& pred);

/// CSV with header t,x1..xn,u1..um; one row per trace sample.
void write_counterexample_csv(const SampledTrace& trace, const std::string& path);

} // namespace stlverify
