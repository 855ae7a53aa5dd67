#include "stlverify/model_check.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace stlverify {

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& G, const std::vector<int>& idx) {
    Eigen::MatrixXd out(G.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = G.col(idx[k]);
    return out;
}

} // namespace

Polytope unsafe_factor_polytope(const Zonotope& R, const FactorIndexTuples& tuples,
                                bool interval_kind, int step, const Polytope& P,
                                int factor_dim) {
    if (P.dim() != R.dim()) throw DimensionError("unsafe_factor_polytope: dimension mismatch");
    const std::vector<int>& dep = interval_kind ? tuples.N[step] : tuples.H[step];
    const std::vector<int>& unc = interval_kind ? tuples.M[step] : tuples.K[step];

    const Eigen::MatrixXd CGdep = P.C * select_columns(R.G, dep);
    const Eigen::MatrixXd CGunc = P.C * select_columns(R.G, unc);

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(P.num_rows(), factor_dim);
    C.leftCols(CGdep.cols()) = CGdep;
    const Eigen::VectorXd d = P.d - P.C * R.c + CGunc.cwiseAbs().rowwise().sum();
    return {C, d};
}

bool factor_poly_empty(const Polytope& P, int factor_dim, double tol) {
    if (P.num_rows() == 0) return false;
    // row-wise prefilter over the box
    bool all_rows_hold_at_zero = true;
    for (int r = 0; r < P.num_rows(); ++r) {
        const double reach = P.C.row(r).cwiseAbs().sum();
        if (-reach > P.d(r) + tol) return true;  // single row infeasible over the box
        if (P.d(r) < -tol) all_rows_hold_at_zero = false;
    }
    if (all_rows_hold_at_zero) return false;  // the origin is a member

    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(factor_dim);
    lp.A_ub = P.C;
    lp.b_ub = P.d;
    lp.A_eq.resize(0, factor_dim);
    lp.b_eq.resize(0);
    lp.lo = Eigen::VectorXd::Constant(factor_dim, -1.0);
    lp.hi = Eigen::VectorXd::Constant(factor_dim, 1.0);
    LpOptions opts;
    opts.tol = tol;
    return lp_solve(lp, opts).status == LpStatus::Infeasible;
}

namespace {

// drops rows that are redundant within the factor box
Polytope factor_poly_reduce(const Polytope& P, int p, double tol) {
    std::vector<bool> keep(P.num_rows(), true);
    for (int r = 0; r < P.num_rows(); ++r) {
        LinearProgram lp;
        lp.c = -P.C.row(r).transpose();
        std::vector<int> others;
        for (int i = 0; i < P.num_rows(); ++i)
            if (i != r && keep[i]) others.push_back(i);
        lp.A_ub.resize(others.size() + 1, p);
        lp.b_ub.resize(others.size() + 1);
        for (size_t i = 0; i < others.size(); ++i) {
            lp.A_ub.row(i) = P.C.row(others[i]);
            lp.b_ub(i) = P.d(others[i]);
        }
        lp.A_ub.row(others.size()) = P.C.row(r);
        lp.b_ub(others.size()) = P.d(r) + 1.0;
        lp.A_eq.resize(0, p);
        lp.b_eq.resize(0);
        lp.lo = Eigen::VectorXd::Constant(p, -1.0);
        lp.hi = Eigen::VectorXd::Constant(p, 1.0);
        const LpResult res = lp_solve(lp);
        if (res.status == LpStatus::Optimal && -res.objective <= P.d(r) + tol) keep[r] = false;
    }
    int kept = 0;
    for (bool k : keep) kept += k;
    if (kept == P.num_rows()) return P;
    Eigen::MatrixXd C(kept, p);
    Eigen::VectorXd d(kept);
    int row = 0;
    for (int i = 0; i < P.num_rows(); ++i) {
        if (keep[i]) {
            C.row(row) = P.C.row(i);
            d(row) = P.d(i);
            ++row;
        }
    }
    return {C, d};
}

std::string row_signature(const Polytope& P) {
    // canonical byte string of the sorted rows
    std::vector<std::string> rows;
    rows.reserve(P.num_rows());
    for (int r = 0; r < P.num_rows(); ++r) {
        std::string s((P.dim() + 1) * sizeof(double), '\0');
        double* out = reinterpret_cast<double*>(s.data());
        for (int j = 0; j < P.dim(); ++j) out[j] = P.C(r, j);
        out[P.dim()] = P.d(r);
        rows.push_back(std::move(s));
    }
    std::sort(rows.begin(), rows.end());
    std::string sig;
    for (const std::string& s : rows) sig += s;
    return sig;
}

// row reduction plus exact deduplication; keeps the represented union of
// factor sets unchanged over the box
void compress_factor_polys(std::vector<Polytope>& polys, int p, double tol) {
    std::set<std::string> seen;
    std::vector<Polytope> out;
    out.reserve(polys.size());
    for (Polytope& P : polys) {
        Polytope red = factor_poly_reduce(P, p, tol);
        std::string sig = row_signature(red);
        if (seen.insert(std::move(sig)).second) out.push_back(std::move(red));
    }
    polys.swap(out);
}

struct Folder {
    const ReachSequence& seq;
    const ModelCheckOptions& opts;
    // cache: one unsafe list per (half_step, body) literal
    std::map<std::pair<int, const StlFormula*>, std::vector<Polytope>> cache;

    const Zonotope& set_at(int half_step) const {
        const int idx = half_step / 2;
        if (half_step % 2 == 0) {
            if (idx >= static_cast<int>(seq.Rt.size()))
                throw Error("model check references a time beyond the reach sequence");
            return seq.Rt[idx];
        }
        if (idx >= static_cast<int>(seq.Rtau.size()))
            throw Error("model check references an interval beyond the reach sequence");
        return seq.Rtau[idx];
    }

    std::vector<Polytope> literal_unsafe(int half_step, const StlPtr& body) {
        const auto key = std::make_pair(half_step, body.get());
        if (auto it = cache.find(key); it != cache.end()) return it->second;

        const Zonotope& R = set_at(half_step);
        const bool interval_kind = (half_step % 2) != 0;
        const int step = half_step / 2;
        const int p = seq.factor_dim();

        std::vector<Polytope> out;
        for (const Polytope& P : body_complement_polytopes(body, R.dim())) {
            if (!zono_poly_intersects(R, P, opts.lp_tol)) continue;
            Polytope K = unsafe_factor_polytope(R, seq.tuples, interval_kind, step, P, p);
            if (!factor_poly_empty(K, p, opts.lp_tol)) out.push_back(std::move(K));
        }
        cache.emplace(key, out);
        return out;
    }

    std::vector<Polytope> fold(const StlFormula& f) {
        if (f.kind == StlKind::True) return {};
        if (f.kind == StlKind::False) {
            // every factor is violating
            return {Polytope::full_space(seq.factor_dim())};
        }
        int half_step;
        StlPtr body;
        if (match_sampled_literal(f, seq.dt, &half_step, &body))
            return literal_unsafe(half_step, body);

        if (f.kind == StlKind::And) {
            std::vector<Polytope> l = fold(*f.lhs);
            std::vector<Polytope> r = fold(*f.rhs);
            l.insert(l.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
            if (static_cast<int>(l.size()) > opts.polytope_cap)
                throw CapError("model check exceeded the polytope cap");
            return l;
        }
        if (f.kind == StlKind::Or) {
            std::vector<Polytope> l = fold(*f.lhs);
            if (l.empty()) return {};
            std::vector<Polytope> r = fold(*f.rhs);
            if (r.empty()) return {};
            std::vector<Polytope> out;
            for (const Polytope& v : l) {
                for (const Polytope& w : r) {
                    Polytope inter = poly_intersection(v, w);
                    if (!factor_poly_empty(inter, seq.factor_dim(), opts.lp_tol))
                        out.push_back(std::move(inter));
                    if (static_cast<int>(out.size()) > opts.polytope_cap)
                        throw CapError("model check exceeded the polytope cap");
                }
            }
            if (out.size() > 1) compress_factor_polys(out, seq.factor_dim(), opts.lp_tol);
            return out;
        }
        throw Error("model check: formula is not in sampled-time form");
    }
};

Polytope factor_box(int p) {
    return Polytope::axis_box(Eigen::VectorXd::Constant(p, -1.0),
                              Eigen::VectorXd::Constant(p, 1.0));
}

} // namespace

UnsafeList model_check_sampled(const ReachSequence& seq, const StlPtr& sampled,
                               const ModelCheckOptions& opts) {
    if (sampled_horizon_steps(sampled, seq.dt) > seq.num_steps())
        throw Error("model check: reach sequence is shorter than the formula horizon");

    // merge same-time literals via CNF when that stays small; otherwise fold
    // the expanded tree directly
    StlPtr tree = sampled;
    if (auto cnf = try_to_cnf(sampled, seq.dt, opts.cnf_clause_cap)) tree = *cnf;

    Folder folder{seq, opts, {}};
    std::vector<Polytope> polys = folder.fold(*tree);

    UnsafeList out;
    const int p = seq.factor_dim();
    const Polytope box = factor_box(p);
    for (Polytope& K : polys) {
        if (opts.reduce_output) {
            Polytope boxed = poly_intersection(K, box);
            out.polys.push_back(poly_remove_redundant(boxed));
        } else {
            out.polys.push_back(std::move(K));
        }
    }
    return out;
}

UnsafeList model_check_sequence(const ReachSequence& seq, const StlPtr& phi,
                                const ModelCheckOptions& opts) {
    const StlPtr sampled = to_sampled_time(negation_normal_form(phi), seq.dt);
    return model_check_sampled(seq, sampled, opts);
}

UnsafeList model_check(const LinearSystem& sys, const Zonotope& X0, const Zonotope& U,
                       const StlPtr& phi, double dt, int kappa, const ModelCheckOptions& opts) {
    const StlPtr sampled = to_sampled_time(negation_normal_form(phi), dt);
    const int steps = sampled_horizon_steps(sampled, dt);
    ReachParams params;
    params.dt = dt;
    params.t_end = steps * dt;
    params.kappa = kappa;
    const ReachSequence seq = reach_sequence(sys, X0, U, params);
    return model_check_sampled(seq, sampled, opts);
}

// --- whole-set baseline -------------------------------------------------

namespace {

const Zonotope& wholeset_set(const ReachSequence& seq, int half_step) {
    const int idx = half_step / 2;
    if (half_step % 2 == 0) {
        if (idx >= static_cast<int>(seq.Rt.size()))
            throw Error("checklist references a time beyond the reach sequence");
        return seq.Rt[idx];
    }
    if (idx >= static_cast<int>(seq.Rtau.size()))
        throw Error("checklist references an interval beyond the reach sequence");
    return seq.Rtau[idx];
}

bool check_passes(const ReachSequence& seq, int half_step,
                  const std::vector<Polytope>& unsafe_polys, double tol) {
    const Zonotope& R = wholeset_set(seq, half_step);
    for (const Polytope& P : unsafe_polys) {
        if (zono_poly_intersects(R, P, tol)) return false;
    }
    return true;
}

} // namespace

bool rtl_entailment_wholeset(const ReachSequence& seq, const RtlChecklist& checklist) {
    if (checklist.always_false) return false;
    if (checklist.num_steps > seq.num_steps())
        throw Error("checklist horizon exceeds the reach sequence");
    for (const RtlClause& clause : checklist.clauses) {
        bool any = false;
        for (const RtlCheck& check : clause.checks) {
            if (check_passes(seq, check.half_step, check.unsafe_polys, 1e-8)) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

bool wholeset_entailment_sampled(const ReachSequence& seq, const StlPtr& sampled,
                                 double lp_tol) {
    std::function<bool(const StlFormula&)> eval = [&](const StlFormula& f) -> bool {
        if (f.kind == StlKind::True) return true;
        if (f.kind == StlKind::False) return false;
        int half_step;
        StlPtr body;
        if (match_sampled_literal(f, seq.dt, &half_step, &body)) {
            return check_passes(seq, half_step,
                                body_complement_polytopes(body, seq.Rt.front().dim()), lp_tol);
        }
        if (f.kind == StlKind::And) return eval(*f.lhs) && eval(*f.rhs);
        if (f.kind == StlKind::Or) return eval(*f.lhs) || eval(*f.rhs);
        throw Error("whole-set entailment: formula is not in sampled-time form");
    };
    return eval(*sampled);
}

// --- predicate pre-evaluation ---------------------------------------------

namespace {

bool same_atom(const StlFormula& a, const StlFormula& b) {
    return a.atom_rel == b.atom_rel && a.atom_b == b.atom_b && a.atom_a.size() == b.atom_a.size() &&
           a.atom_a == b.atom_a;
}

// folds temporal operators over constant operands after substitution
StlPtr simplify_constants(const StlPtr& f) {
    if (!f->lhs && !f->rhs) return f;
    const StlPtr l = f->lhs ? simplify_constants(f->lhs) : nullptr;
    const StlPtr r = f->rhs ? simplify_constants(f->rhs) : nullptr;
    auto is_true = [](const StlPtr& x) { return x && x->kind == StlKind::True; };
    auto is_false = [](const StlPtr& x) { return x && x->kind == StlKind::False; };
    switch (f->kind) {
        case StlKind::Not:
            if (is_true(l)) return StlFormula::make_false();
            if (is_false(l)) return StlFormula::make_true();
            return StlFormula::negation(l);
        case StlKind::And: return StlFormula::conjunction(l, r);
        case StlKind::Or: return StlFormula::disjunction(l, r);
        case StlKind::Until:
            if (is_false(r)) return StlFormula::make_false();
            if (is_true(r) && (is_true(l) || f->t_lo == 0.0)) return StlFormula::make_true();
            return StlFormula::until(f->t_lo, f->t_hi, l, r);
        case StlKind::Release:
            if (is_true(r)) return StlFormula::make_true();
            if (is_false(r) && (is_false(l) || f->t_lo == 0.0)) return StlFormula::make_false();
            return StlFormula::release(f->t_lo, f->t_hi, l, r);
        case StlKind::Finally:
            if (is_true(l) || is_false(l)) return l;
            return StlFormula::finally_(f->t_lo, f->t_hi, l);
        case StlKind::Globally:
            if (is_true(l) || is_false(l)) return l;
            return StlFormula::globally(f->t_lo, f->t_hi, l);
        case StlKind::Next:
            if (is_true(l) || is_false(l)) return l;
            return StlFormula::next(f->t_lo, l);
        default: return f;
    }
}

} // namespace

StlPtr pre_evaluate_predicates(const ReachSequence& seq, const StlPtr& phi) {
    // collect distinct atoms
    std::vector<StlPtr> atoms;
    std::function<void(const StlPtr&)> collect = [&](const StlPtr& f) {
        if (f->kind == StlKind::Atom) {
            for (const StlPtr& a : atoms)
                if (same_atom(*a, *f)) return;
            atoms.push_back(f);
            return;
        }
        if (f->lhs) collect(f->lhs);
        if (f->rhs) collect(f->rhs);
    };
    collect(phi);
    if (atoms.empty()) return phi;

    const int n = seq.Rt.front().dim();
    const std::vector<Zonotope>& tube =
        seq.Rtau.empty() ? seq.Rt : seq.Rtau;  // horizon 0: only the initial set exists

    std::vector<int> verdicts;  // +1 always true, -1 always false, 0 mixed
    for (const StlPtr& a : atoms) {
        if (max_state_index(*a) > n)
            throw DimensionError("pre_evaluate_predicates: atom beyond system dimension");
        const Eigen::VectorXd row = [&] {
            Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
            r.head(a->atom_a.size()) = a->atom_a;
            return r;
        }();
        const Polytope complement = Polytope::halfspace(-row, -a->atom_b);  // closed !atom
        const Polytope closure = Polytope::halfspace(row, a->atom_b);       // closed atom

        bool hits_complement = false, hits_closure = false;
        for (const Zonotope& R : tube) {
            if (!hits_complement && zono_poly_intersects(R, complement)) hits_complement = true;
            if (!hits_closure && zono_poly_intersects(R, closure)) hits_closure = true;
            if (hits_complement && hits_closure) break;
        }
        verdicts.push_back(!hits_complement ? 1 : (!hits_closure ? -1 : 0));
    }

    std::function<StlPtr(const StlPtr&)> rewrite = [&](const StlPtr& f) -> StlPtr {
        if (f->kind == StlKind::Atom) {
            for (size_t i = 0; i < atoms.size(); ++i) {
                if (same_atom(*atoms[i], *f)) {
                    if (verdicts[i] > 0) return StlFormula::make_true();
                    if (verdicts[i] < 0) return StlFormula::make_false();
                    return f;
                }
            }
            return f;
        }
        if (!f->lhs && !f->rhs) return f;
        StlPtr l = f->lhs ? rewrite(f->lhs) : nullptr;
        StlPtr r = f->rhs ? rewrite(f->rhs) : nullptr;
        switch (f->kind) {
            case StlKind::Not: return StlFormula::negation(l);
            case StlKind::And: return StlFormula::conjunction(l, r);
            case StlKind::Or: return StlFormula::disjunction(l, r);
            case StlKind::Until: return StlFormula::until(f->t_lo, f->t_hi, l, r);
            case StlKind::Release: return StlFormula::release(f->t_lo, f->t_hi, l, r);
            case StlKind::Finally: return StlFormula::finally_(f->t_lo, f->t_hi, l);
            case StlKind::Globally: return StlFormula::globally(f->t_lo, f->t_hi, l);
            case StlKind::Next: return StlFormula::next(f->t_lo, l);
            default: return f;
        }
    };
    return simplify_constants(rewrite(phi));
}

} // namespace stlverify
