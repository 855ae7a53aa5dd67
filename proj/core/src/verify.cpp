#include "stlverify/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <cstdio>

namespace stlverify {

const char* to_string(VerdictResult r) {
    switch (r) {
        case VerdictResult::Safe: return "safe";
        case VerdictResult::Unsafe: return "unsafe";
        case VerdictResult::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("STLVERIFY_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "quiet" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[stlverify] %s\n", msg.c_str());
}

} // namespace

InputSpec InputSpec::constant_set(Zonotope U) {
    InputSpec s;
    s.constant = std::move(U);
    return s;
}

InputSpec InputSpec::piecewise(std::vector<Zonotope> sets, double dt) {
    if (sets.empty()) throw Error("InputSpec: piecewise list must not be empty");
    if (!(dt > 0)) throw Error("InputSpec: piecewise grid must be positive");
    InputSpec s;
    s.constant = sets.front();
    s.steps = std::move(sets);
    s.step_dt = dt;
    return s;
}

std::vector<Zonotope> InputSpec::resample(double dt, int num_steps, bool* exact) const {
    std::vector<Zonotope> out;
    out.reserve(num_steps);
    bool all_exact = true;
    if (!time_varying()) {
        for (int i = 0; i < num_steps; ++i) out.push_back(constant);
    } else {
        const auto clamp_idx = [&](long idx) {
            return std::clamp<long>(idx, 0, static_cast<long>(steps.size()) - 1);
        };
        for (int i = 0; i < num_steps; ++i) {
            // pieces overlapping [i dt, (i+1) dt)
            const long first = clamp_idx(static_cast<long>(std::floor(i * dt / step_dt + 1e-9)));
            const long last =
                clamp_idx(static_cast<long>(std::ceil((i + 1) * dt / step_dt - 1e-9)) - 1);
            if (first == last) {
                out.push_back(steps[first]);
            } else {
                // reach step spans several pieces: enclose their union
                all_exact = false;
                Zonotope hull = steps[first];
                for (long j = first + 1; j <= last; ++j)
                    hull = zono_convex_hull_enclosure(hull, steps[j]);
                out.push_back(std::move(hull));
            }
        }
    }
    if (exact) *exact = all_exact;
    return out;
}

int tune_truncation_order(const Eigen::MatrixXd& A, double dt, int cap) {
    const Eigen::Index n = A.rows();
    IntervalMatrix acc = IntervalMatrix::zero(n, n);
    Eigen::MatrixXd P = A / 2.0;  // A^{j-1}/j! at j = 2
    double prev_norm = 0.0;

    auto add_term = [&](int j) {
        const double ex = -1.0 / (j - 1.0);
        const double coeff = (std::pow(j, j * ex) - std::pow(j, ex)) * std::pow(dt, j);
        acc = acc + IntervalMatrix::scalar_interval_times(coeff, 0.0, P);
        if (!acc.lo.allFinite() || !acc.hi.allFinite())
            throw OverflowError("truncation-order tuning overflowed; refine the time step");
        P = (P * A) / static_cast<double>(j + 1);
    };

    add_term(2);
    prev_norm = imat_frobenius_norm(acc);  // ||T^(2)||
    for (int kappa = 2; kappa <= cap; ++kappa) {
        add_term(kappa + 1);
        const double next_norm = imat_frobenius_norm(acc);  // ||T^(kappa+1)||
        if (next_norm == 0.0) return kappa;
        if (1.0 - prev_norm / next_norm <= 1e-10) return kappa;
        prev_norm = next_norm;
    }
    throw CapError("truncation order cap exceeded");
}

SampledTrace counterexample_trajectory(const LinearSystem& sys, const Zonotope& X0,
                                       const std::vector<Zonotope>& U_steps,
                                       const Eigen::VectorXd& alpha, double dt, double t_end) {
    const int N = static_cast<int>(std::llround(t_end / dt));
    if (static_cast<int>(U_steps.size()) < N)
        throw DimensionError("counterexample_trajectory: need one input set per step");
    const int gx = X0.num_generators();
    const int gu = N > 0 ? U_steps.front().num_generators() : 0;
    if (alpha.size() != gx + static_cast<Eigen::Index>(gu) * N)
        throw DimensionError("counterexample_trajectory: factor vector has wrong dimension");

    const Eigen::MatrixXd Ed = matrix_exponential(sys.A, dt);
    const Eigen::MatrixXd TB = propagation_matrix(sys.A, dt) * sys.B;

    SampledTrace trace;
    Eigen::VectorXd x = X0.c + X0.G * alpha.head(gx);
    trace.times.push_back(0.0);
    trace.states.push_back(x);
    for (int i = 0; i < N; ++i) {
        const Zonotope& U = U_steps[i];
        const Eigen::VectorXd u = U.c + U.G * alpha.segment(gx + gu * i, gu);
        x = Ed * x + TB * u;
        trace.times.push_back((i + 1) * dt);
        trace.states.push_back(x);
        trace.inputs.push_back(u);
    }
    return trace;
}

namespace {

struct IterationArtifacts {
    ReachSequence seq;
    StlPtr sampled_pos;
    StlPtr sampled_neg;
    std::vector<Zonotope> U_steps;
    bool inputs_exact = true;
};

} // namespace

Verdict verify(const LinearSystem& sys, const Zonotope& X0, const InputSpec& U,
               const StlPtr& phi, const VerifierConfig& cfg) {
    Verdict verdict;
    const double horizon = formula_horizon(*phi);
    double dt = cfg.dt_init > 0 ? cfg.dt_init : (horizon > 0 ? horizon : 1.0);

    const StlPtr phi_nnf = negation_normal_form(phi);
    const StlPtr neg_nnf = negation_normal_form(negate(phi));

    ModelCheckOptions mc_opts;
    mc_opts.polytope_cap = cfg.polytope_cap;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        IterationDiag diag;
        diag.dt = dt;
        verdict.iterations = iter;
        verdict.dt_final = dt;

        try {
            const int kappa = tune_truncation_order(sys.A, dt, cfg.kappa_cap);
            diag.kappa = kappa;
            verdict.kappa_final = kappa;

            const StlPtr sampled_pos = to_sampled_time(phi_nnf, dt);
            const StlPtr sampled_neg = to_sampled_time(neg_nnf, dt);
            const int steps = std::max(sampled_horizon_steps(sampled_pos, dt),
                                       sampled_horizon_steps(sampled_neg, dt));

            ReachParams params;
            params.dt = dt;
            params.t_end = steps * dt;
            params.kappa = kappa;

            bool inputs_exact = true;
            const std::vector<Zonotope> U_steps = U.resample(dt, steps, &inputs_exact);
            const ReachSequence seq =
                U.time_varying() ? reach_sequence(sys, X0, U_steps, params)
                                 : reach_sequence(sys, X0, U.constant, params);
            diag.reach_ok = true;

            if (cfg.run_wholeset_baseline)
                diag.wholeset_entailed = wholeset_entailment_sampled(seq, sampled_pos);

            // verification: factor-space model check of phi
            if (!cfg.falsify_only) {
                const StlPtr pre_pos = pre_evaluate_predicates(seq, sampled_pos);
                const UnsafeList L = model_check_sampled(seq, pre_pos, mc_opts);
                diag.unsafe_polytopes = L.size();
                log_info("iter " + std::to_string(iter) + " dt=" + std::to_string(dt) +
                         " kappa=" + std::to_string(kappa) +
                         " |L(phi)|=" + std::to_string(L.size()));
                if (L.empty()) {
                    verdict.result = VerdictResult::Safe;
                    verdict.diags.push_back(std::move(diag));
                    return verdict;
                }
                verdict.unsafe_factors = L;
            }

            // falsification: model check !phi, then search for a factor
            // outside all potentially-safe polytopes
            if (inputs_exact) {
                const StlPtr pre_neg = pre_evaluate_predicates(seq, sampled_neg);
                const UnsafeList Lneg = model_check_sampled(seq, pre_neg, mc_opts);
                diag.safe_polytopes = Lneg.size();

                MilpOptions milp_opts;
                milp_opts.node_cap = cfg.milp_node_cap;
                milp_opts.epsilon = cfg.epsilon;
                const MilpResult cex = find_counterexample(Lneg, seq.factor_dim(), milp_opts);
                if (cex.status == MilpStatus::Feasible) {
                    SampledTrace traj = counterexample_trajectory(sys, X0, U_steps, cex.alpha,
                                                                  dt, params.t_end);
                    if (!monitor_trace(phi, traj)) {
                        verdict.result = VerdictResult::Unsafe;
                        verdict.counterexample = std::move(traj);
                        verdict.counterexample_alpha = cex.alpha;
                        verdict.diags.push_back(std::move(diag));
                        return verdict;
                    }
                    diag.note = "counterexample candidate rejected by the monitor";
                } else if (cex.status == MilpStatus::NodeCapExceeded) {
                    diag.note = "counterexample search hit the node cap";
                }
            } else {
                diag.note = "time-varying input grid unaligned; falsification skipped";
            }
        } catch (const DiscretizationError& e) {
            diag.note = std::string("discretization: ") + e.what();
        } catch (const OverflowError& e) {
            diag.note = std::string("overflow: ") + e.what();
        } catch (const CapError& e) {
            diag.note = std::string("cap: ") + e.what();
        }

        log_info("iter " + std::to_string(iter) + " inconclusive" +
                 (diag.note.empty() ? "" : (": " + diag.note)));
        verdict.diags.push_back(std::move(diag));
        dt /= 2.0;
    }

    verdict.result = VerdictResult::Unknown;
    return verdict;
}

Prediction predict_safe_behaviors(const LinearSystem& sys, const Zonotope& X0,
                                  const InputSpec& U, const StlPtr& phi, double dt, int kappa,
                                  const ModelCheckOptions& opts) {
    const StlPtr neg = negation_normal_form(negate(phi));
    const StlPtr sampled = to_sampled_time(neg, dt);
    const int steps = sampled_horizon_steps(sampled, dt);

    ReachParams params;
    params.dt = dt;
    params.t_end = steps * dt;
    params.kappa = kappa;

    Prediction out;
    if (U.time_varying()) {
        bool exact = true;
        out.reach = reach_sequence(sys, X0, U.resample(dt, steps, &exact), params);
    } else {
        out.reach = reach_sequence(sys, X0, U.constant, params);
    }
    out.legal_factors = model_check_sampled(out.reach, sampled, opts);
    return out;
}

} // namespace stlverify
