#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stlverify/set_ops.hpp"

namespace stlverify {

enum class StlKind { True, False, Atom, Not, And, Or, Until, Release, Finally, Globally, Next };

/// Atoms are normalized to a'x <= b or a'x < b; >= and > are stored with the
/// row negated.
enum class AtomRel { Le, Lt };

struct StlFormula;
using StlPtr = std::shared_ptr<const StlFormula>;

/// Immutable formula tree. Unary operators use `lhs`; Until/Release use both
/// children. Temporal windows are [t_lo, t_hi]; Next uses t_lo only.
struct StlFormula {
    StlKind kind = StlKind::True;

    Eigen::VectorXd atom_a;
    double atom_b = 0.0;
    AtomRel atom_rel = AtomRel::Le;

    double t_lo = 0.0;
    double t_hi = 0.0;

    StlPtr lhs;
    StlPtr rhs;

    static StlPtr make_true();
    static StlPtr make_false();
    static StlPtr atom(Eigen::VectorXd a, double b, AtomRel rel);
    static StlPtr negation(StlPtr f);
    /// Conjunction/disjunction with true/false folding.
    static StlPtr conjunction(StlPtr l, StlPtr r);
    static StlPtr disjunction(StlPtr l, StlPtr r);
    static StlPtr until(double a, double b, StlPtr l, StlPtr r);
    static StlPtr release(double a, double b, StlPtr l, StlPtr r);
    static StlPtr finally_(double a, double b, StlPtr f);
    static StlPtr globally(double a, double b, StlPtr f);
    static StlPtr next(double a, StlPtr f);

    bool is_atom_level() const;  ///< only True/False/Atom/And/Or below this node
};

/// Parses the ASCII STL grammar:
///   atoms    c1*x<i> [+|-] ... (<=|<|>=|>) const
///   literals true, false
///   unary    !  F[a,b]  G[a,b]  N[a]
///   binary   U[a,b]  R[a,b]  (tighter than &), & (tighter than |)
/// Whitespace is insignificant; parentheses group. State variables are
/// 1-based (x1, x2, ...). Throws ParseError with line/column context.
StlPtr parse_stl(const std::string& text);

std::string to_string(const StlFormula& f);

/// Largest 1-based state index referenced by any atom (0 when none).
int max_state_index(const StlFormula& f);

/// Rewrites release/finally/globally/next into {Atom, Not, And, Or, Until}.
StlPtr desugar(const StlPtr& f);

/// Not(phi); normalized later by negation_normal_form.
StlPtr negate(const StlPtr& f);

/// Pushes negations inward until they are absorbed by atoms (the relation
/// flips); keeps the sugared operator set.
StlPtr negation_normal_form(const StlPtr& f);

/// Maximum nesting-summed operator end time.
double formula_horizon(const StlFormula& f);

/// Piecewise-linear interpolated trace; times strictly increasing. Inputs are
/// optional (one per step) and only carried for export.
struct SampledTrace {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> inputs;

    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    double end_time() const { return times.empty() ? 0.0 : times.back(); }
    Eigen::VectorXd state_at(double t) const;
};

/// Boolean satisfaction at time 0 under piecewise-linear interpolation.
/// Quantifiers over time are evaluated on the trace sample times plus the
/// operator boundary times. Throws when the trace is shorter than the
/// formula horizon.
bool monitor_trace(const StlPtr& phi, const SampledTrace& trace);

/// Rewrites all operator times to integer multiples of dt with sound
/// rounding (globally/release widened, finally/until narrowed) and expands
/// the temporal operators over the grid. The result is a positive boolean
/// combination of point literals Next[k dt](body) and one-step interval
/// literals Next[k dt](Globally[0,dt](body)) with atom-level bodies.
/// Requires negation normal form. Throws DiscretizationError when a
/// narrowed window becomes empty (refinement is expected to recover).
StlPtr to_sampled_time(const StlPtr& phi, double dt);

/// Conjunctive normal form over sampled-time literals; literals at the same
/// half step are merged by disjoining their bodies. Returns nullopt when the
/// clause count would exceed `clause_cap` (0 = unlimited).
std::optional<StlPtr> try_to_cnf(const StlPtr& sampled, double dt, std::size_t clause_cap);

/// CNF without a cap.
StlPtr to_cnf(const StlPtr& sampled, double dt);

/// Recognizes a sampled-time literal; half_step is even for point checks and
/// odd for interval checks.
bool match_sampled_literal(const StlFormula& f, double dt, int* half_step, StlPtr* body);

/// Number of whole reach steps needed to evaluate the sampled formula.
int sampled_horizon_steps(const StlPtr& sampled, double dt);

/// One intersection check of Eq.-style reachset temporal logic: at time
/// half_step * dt/2, the reachable set must not intersect any polytope of
/// the union.
struct RtlCheck {
    int half_step = 0;
    std::vector<Polytope> unsafe_polys;
    StlPtr body;  // the atom-level predicate the check asserts

    bool interval_kind() const { return (half_step % 2) != 0; }
};

struct RtlClause {
    std::vector<RtlCheck> checks;  // disjunction
};

/// Conjunction of clauses; an empty clause list means trivially satisfied.
struct RtlChecklist {
    std::vector<RtlClause> clauses;
    double dt = 0.0;
    int num_steps = 0;        // reach steps required
    bool always_false = false;  // a clause collapsed to an empty disjunction
};

/// Builds the intersection checklist from a CNF sampled-time formula.
/// Atom rows are padded to state_dim; strict relations compile to closed
/// complements. Throws on non-CNF residual structure or out-of-range atoms.
RtlChecklist to_rtl_checklist(const StlPtr& phi_cnf, double dt, int state_dim);

/// Polytope union representing the closed complement of an atom-level body;
/// empty vector when the body is `true`.
std::vector<Polytope> body_complement_polytopes(const StlPtr& body, int state_dim);

} // namespace stlverify
