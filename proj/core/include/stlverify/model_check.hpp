#pragma once

#include "stlverify/reach.hpp"
#include "stlverify/stl.hpp"

namespace stlverify {

/// Factor-space polytopes whose union over-approximates the specification-
/// violating zonotope factors. An empty list means the specification holds.
struct UnsafeList {
    std::vector<Polytope> polys;

    bool empty() const { return polys.empty(); }
    std::size_t size() const { return polys.size(); }
};

struct ModelCheckOptions {
    int polytope_cap = 10000;       // abort (CapError) instead of exhausting memory
    std::size_t cnf_clause_cap = 512;  // beyond this the formula tree is folded directly
    double lp_tol = 1e-8;
    bool reduce_output = true;  // box-intersect and drop redundant rows on output
};

/// Prop.-2 construction: factors outside the returned polytope are guaranteed
/// not to reach P at the given step. The polytope lives in the full factor
/// space (zero columns for future input factors).
Polytope unsafe_factor_polytope(const Zonotope& R, const FactorIndexTuples& tuples,
                                bool interval_kind, int step, const Polytope& P,
                                int factor_dim);

/// Full Alg.-2 pipeline: reachability at (dt, kappa) for the horizon of phi,
/// then the factor-space fold over the compiled formula.
UnsafeList model_check(const LinearSystem& sys, const Zonotope& X0, const Zonotope& U,
                       const StlPtr& phi, double dt, int kappa,
                       const ModelCheckOptions& opts = {});

/// Fold over a precomputed reach sequence; phi is normalized and sampled
/// internally.
UnsafeList model_check_sequence(const ReachSequence& seq, const StlPtr& phi,
                                const ModelCheckOptions& opts = {});

/// Same, for a formula already in sampled-time form.
UnsafeList model_check_sampled(const ReachSequence& seq, const StlPtr& sampled,
                               const ModelCheckOptions& opts = {});

/// Whole-set entailment of a checklist (the baseline this tool improves on):
/// every clause must contain a check whose polytopes are all disjoint from
/// the corresponding reachable set.
bool rtl_entailment_wholeset(const ReachSequence& seq, const RtlChecklist& checklist);

/// Whole-set entailment evaluated directly on a sampled-time formula tree.
bool wholeset_entailment_sampled(const ReachSequence& seq, const StlPtr& sampled,
                                 double lp_tol = 1e-8);

/// Replaces atoms that hold (or fail) on the whole reach tube by literals.
/// Sound for every trajectory inside the tube.
StlPtr pre_evaluate_predicates(const ReachSequence& seq, const StlPtr& phi);

/// Emptiness of a factor polytope over the factor box [-1,1]^p.
bool factor_poly_empty(const Polytope& P, int factor_dim, double tol = 1e-8);

} // namespace stlverify
