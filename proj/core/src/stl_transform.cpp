#include "stlverify/stl.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace stlverify {

StlPtr negate(const StlPtr& f) { return StlFormula::negation(f); }

StlPtr desugar(const StlPtr& f) {
    switch (f->kind) {
        case StlKind::True:
        case StlKind::False:
        case StlKind::Atom:
            return f;
        case StlKind::Not:
            return StlFormula::negation(desugar(f->lhs));
        case StlKind::And:
            return StlFormula::conjunction(desugar(f->lhs), desugar(f->rhs));
        case StlKind::Or:
            return StlFormula::disjunction(desugar(f->lhs), desugar(f->rhs));
        case StlKind::Until:
            return StlFormula::until(f->t_lo, f->t_hi, desugar(f->lhs), desugar(f->rhs));
        case StlKind::Release:
            // phi1 R phi2 = !(!phi1 U !phi2)
            return StlFormula::negation(StlFormula::until(
                f->t_lo, f->t_hi, StlFormula::negation(desugar(f->lhs)),
                StlFormula::negation(desugar(f->rhs))));
        case StlKind::Finally:
            return StlFormula::until(f->t_lo, f->t_hi, StlFormula::make_true(), desugar(f->lhs));
        case StlKind::Globally:
            // G phi = !F !phi
            return StlFormula::negation(StlFormula::until(
                f->t_lo, f->t_hi, StlFormula::make_true(), StlFormula::negation(desugar(f->lhs))));
        case StlKind::Next:
            return StlFormula::until(f->t_lo, f->t_lo, StlFormula::make_true(), desugar(f->lhs));
    }
    throw Error("desugar: unreachable");
}

namespace {

StlPtr negated_atom(const StlFormula& a) {
    // !(a'x <= b) is a'x > b, i.e. -a'x < -b; !(a'x < b) is -a'x <= -b
    return StlFormula::atom(-a.atom_a, -a.atom_b,
                            a.atom_rel == AtomRel::Le ? AtomRel::Lt : AtomRel::Le);
}

StlPtr nnf_rec(const StlPtr& f, bool neg) {
    switch (f->kind) {
        case StlKind::True:
            return neg ? StlFormula::make_false() : f;
        case StlKind::False:
            return neg ? StlFormula::make_true() : f;
        case StlKind::Atom:
            return neg ? negated_atom(*f) : f;
        case StlKind::Not:
            return nnf_rec(f->lhs, !neg);
        case StlKind::And:
            return neg ? StlFormula::disjunction(nnf_rec(f->lhs, true), nnf_rec(f->rhs, true))
                       : StlFormula::conjunction(nnf_rec(f->lhs, false), nnf_rec(f->rhs, false));
        case StlKind::Or:
            return neg ? StlFormula::conjunction(nnf_rec(f->lhs, true), nnf_rec(f->rhs, true))
                       : StlFormula::disjunction(nnf_rec(f->lhs, false), nnf_rec(f->rhs, false));
        case StlKind::Until:
            return neg ? StlFormula::release(f->t_lo, f->t_hi, nnf_rec(f->lhs, true),
                                             nnf_rec(f->rhs, true))
                       : StlFormula::until(f->t_lo, f->t_hi, nnf_rec(f->lhs, false),
                                           nnf_rec(f->rhs, false));
        case StlKind::Release:
            return neg ? StlFormula::until(f->t_lo, f->t_hi, nnf_rec(f->lhs, true),
                                           nnf_rec(f->rhs, true))
                       : StlFormula::release(f->t_lo, f->t_hi, nnf_rec(f->lhs, false),
                                             nnf_rec(f->rhs, false));
        case StlKind::Finally:
            return neg ? StlFormula::globally(f->t_lo, f->t_hi, nnf_rec(f->lhs, true))
                       : StlFormula::finally_(f->t_lo, f->t_hi, nnf_rec(f->lhs, false));
        case StlKind::Globally:
            return neg ? StlFormula::finally_(f->t_lo, f->t_hi, nnf_rec(f->lhs, true))
                       : StlFormula::globally(f->t_lo, f->t_hi, nnf_rec(f->lhs, false));
        case StlKind::Next:
            return StlFormula::next(f->t_lo, nnf_rec(f->lhs, neg));
    }
    throw Error("negation_normal_form: unreachable");
}

} // namespace

StlPtr negation_normal_form(const StlPtr& f) { return nnf_rec(f, false); }

double formula_horizon(const StlFormula& f) {
    switch (f.kind) {
        case StlKind::True:
        case StlKind::False:
        case StlKind::Atom:
            return 0.0;
        case StlKind::Not:
            return formula_horizon(*f.lhs);
        case StlKind::And:
        case StlKind::Or:
            return std::max(formula_horizon(*f.lhs), formula_horizon(*f.rhs));
        case StlKind::Until:
        case StlKind::Release:
            return f.t_hi + std::max(formula_horizon(*f.lhs), formula_horizon(*f.rhs));
        case StlKind::Finally:
        case StlKind::Globally:
            return f.t_hi + formula_horizon(*f.lhs);
        case StlKind::Next:
            return f.t_lo + formula_horizon(*f.lhs);
    }
    throw Error("formula_horizon: unreachable");
}

// --- sampled-time expansion ---------------------------------------------
//
// The expansion reduces every temporal operator to point literals
// P(k) = N[k dt] body and one-step interval literals I(i) = N[i dt] G[0,dt]
// body over the grid, with rounding chosen so that satisfaction of the
// expanded formula implies satisfaction of the original dense-time formula.

namespace {

constexpr double kGridEps = 1e-9;

struct Expander {
    double dt;

    long widen_lo(double t) const { return static_cast<long>(std::floor(t / dt + kGridEps)); }
    long widen_hi(double t) const { return static_cast<long>(std::ceil(t / dt - kGridEps)); }
    long narrow_lo(double t) const { return static_cast<long>(std::ceil(t / dt - kGridEps)); }
    long narrow_hi(double t) const { return static_cast<long>(std::floor(t / dt + kGridEps)); }

    bool on_grid(double t, long* k) const {
        const double s = t / dt;
        const long r = std::lround(s);
        if (std::abs(s - r) < kGridEps) {
            *k = r;
            return true;
        }
        return false;
    }

    StlPtr point_lit(long k, const StlPtr& body) const {
        if (body->kind == StlKind::True || body->kind == StlKind::False) return body;
        return StlFormula::next(static_cast<double>(k) * dt, body);
    }

    StlPtr interval_lit(long i, const StlPtr& body) const {
        if (body->kind == StlKind::True || body->kind == StlKind::False) return body;
        return StlFormula::next(static_cast<double>(i) * dt,
                                StlFormula::globally(0.0, dt, body));
    }

    // satisfaction at the exact time k*dt; conjunctions split so checks stay
    // per-predicate, disjunctions of atoms stay whole (they compile to a
    // single polytope)
    StlPtr at_point(const StlPtr& f, long k) const {
        if (f->is_atom_level() && f->kind != StlKind::And) return point_lit(k, f);
        switch (f->kind) {
            case StlKind::And:
                return StlFormula::conjunction(at_point(f->lhs, k), at_point(f->rhs, k));
            case StlKind::Or:
                return StlFormula::disjunction(at_point(f->lhs, k), at_point(f->rhs, k));
            case StlKind::Next: {
                long s;
                if (on_grid(f->t_lo, &s)) return at_point(f->lhs, k + s);
                // off-grid next: require the operand throughout the covering
                // interval (sound strengthening)
                return on_interval(f->lhs, k + widen_lo(f->t_lo));
            }
            case StlKind::Finally: {
                const long lo = narrow_lo(f->t_lo), hi = narrow_hi(f->t_hi);
                if (lo > hi)
                    throw DiscretizationError(
                        "finally window is unsatisfiable at this time step");
                StlPtr out = StlFormula::make_false();
                for (long i = lo; i <= hi; ++i)
                    out = StlFormula::disjunction(out, at_point(f->lhs, k + i));
                return out;
            }
            case StlKind::Globally: {
                // points and intervals interleaved along the grid
                const long lo = widen_lo(f->t_lo), hi = widen_hi(f->t_hi);
                StlPtr out = StlFormula::make_true();
                for (long i = lo; i <= hi; ++i) {
                    out = StlFormula::conjunction(out, at_point(f->lhs, k + i));
                    if (i < hi) out = StlFormula::conjunction(out, on_interval(f->lhs, k + i));
                }
                return out;
            }
            case StlKind::Until: {
                const long lo = narrow_lo(f->t_lo), hi = narrow_hi(f->t_hi);
                if (lo > hi)
                    throw DiscretizationError("until window is unsatisfiable at this time step");
                StlPtr out = StlFormula::make_false();
                StlPtr prefix = StlFormula::make_true();  // phi1 over [0, i dt)
                for (long i = 0; i <= hi; ++i) {
                    if (i >= lo)
                        out = StlFormula::disjunction(
                            out, StlFormula::conjunction(prefix, at_point(f->rhs, k + i)));
                    prefix = StlFormula::conjunction(
                        prefix, StlFormula::conjunction(at_point(f->lhs, k + i),
                                                        on_interval(f->lhs, k + i)));
                }
                return out;
            }
            case StlKind::Release: {
                const long lo = widen_lo(f->t_lo), hi = widen_hi(f->t_hi);
                StlPtr out = StlFormula::make_true();
                auto witness = [&](long upto) {
                    StlPtr w = StlFormula::make_false();
                    for (long j = 0; j < upto; ++j)
                        w = StlFormula::disjunction(w, at_point(f->lhs, k + j));
                    return w;
                };
                for (long i = lo; i <= hi; ++i)
                    out = StlFormula::conjunction(
                        out, StlFormula::disjunction(at_point(f->rhs, k + i), witness(i)));
                for (long i = lo; i < hi; ++i)
                    out = StlFormula::conjunction(
                        out, StlFormula::disjunction(on_interval(f->rhs, k + i), witness(i)));
                return out;
            }
            default:
                throw Error("to_sampled_time expects negation normal form");
        }
    }

    // satisfaction throughout the interval [i dt, (i+1) dt]
    StlPtr on_interval(const StlPtr& f, long i) const {
        if (f->is_atom_level() && f->kind != StlKind::And) return interval_lit(i, f);
        switch (f->kind) {
            case StlKind::And:
                return StlFormula::conjunction(on_interval(f->lhs, i), on_interval(f->rhs, i));
            case StlKind::Or:
                // holds throughout if one disjunct holds throughout
                return StlFormula::disjunction(on_interval(f->lhs, i), on_interval(f->rhs, i));
            case StlKind::Next: {
                long s;
                if (on_grid(f->t_lo, &s)) return on_interval(f->lhs, i + s);
                StlPtr out = StlFormula::make_true();
                for (long j = widen_lo(f->t_lo); j <= widen_hi(f->t_lo); ++j)
                    out = StlFormula::conjunction(out, on_interval(f->lhs, i + j));
                return out;
            }
            case StlKind::Globally: {
                StlPtr out = StlFormula::make_true();
                for (long j = widen_lo(f->t_lo); j <= widen_hi(f->t_hi); ++j)
                    out = StlFormula::conjunction(out, on_interval(f->lhs, i + j));
                return out;
            }
            case StlKind::Finally: {
                const long lo = narrow_lo(f->t_lo), hi = narrow_hi(f->t_hi);
                if (lo > hi)
                    throw DiscretizationError(
                        "finally window is unsatisfiable at this time step");
                StlPtr out = StlFormula::make_false();
                for (long s = lo; s <= hi; ++s)
                    out = StlFormula::disjunction(out, on_interval(f->lhs, i + s));
                return out;
            }
            case StlKind::Until: {
                const long lo = narrow_lo(f->t_lo), hi = narrow_hi(f->t_hi);
                if (lo > hi)
                    throw DiscretizationError("until window is unsatisfiable at this time step");
                StlPtr out = StlFormula::make_false();
                // witness s needs phi1 throughout tau_i..tau_{i+s} (s >= 1)
                StlPtr prefix = StlFormula::make_true();
                for (long s = 0; s <= hi; ++s) {
                    if (s == 1)
                        prefix = StlFormula::conjunction(on_interval(f->lhs, i),
                                                         on_interval(f->lhs, i + 1));
                    else if (s > 1)
                        prefix = StlFormula::conjunction(prefix, on_interval(f->lhs, i + s));
                    if (s >= lo)
                        out = StlFormula::disjunction(
                            out, StlFormula::conjunction(prefix, on_interval(f->rhs, i + s)));
                }
                return out;
            }
            case StlKind::Release: {
                const long lo = widen_lo(f->t_lo), hi = widen_hi(f->t_hi);
                StlPtr out = StlFormula::make_true();
                for (long j = lo; j <= hi; ++j) {
                    StlPtr w = StlFormula::make_false();
                    for (long p = 1; p < j; ++p)
                        w = StlFormula::disjunction(w, at_point(f->lhs, i + p));
                    out = StlFormula::conjunction(
                        out, StlFormula::disjunction(on_interval(f->rhs, i + j), w));
                }
                return out;
            }
            default:
                throw Error("to_sampled_time expects negation normal form");
        }
    }
};

} // namespace

StlPtr to_sampled_time(const StlPtr& phi, double dt) {
    if (!(dt > 0)) throw Error("to_sampled_time: dt must be positive");
    Expander ex{dt};
    return ex.at_point(phi, 0);
}

bool match_sampled_literal(const StlFormula& f, double dt, int* half_step, StlPtr* body) {
    auto grid_index = [&](double t, long* k) {
        const double s = t / dt;
        const long r = std::lround(s);
        if (std::abs(s - r) < 1e-9 && r >= 0) {
            *k = r;
            return true;
        }
        return false;
    };

    if (f.is_atom_level() && (f.kind == StlKind::Atom || f.kind == StlKind::And ||
                              f.kind == StlKind::Or)) {
        // bare atom-level formula = point check at time zero
        if (half_step) *half_step = 0;
        if (body && f.kind == StlKind::Atom)
            *body = StlFormula::atom(f.atom_a, f.atom_b, f.atom_rel);
        if (body && f.kind != StlKind::Atom)
            *body = std::make_shared<const StlFormula>(f);
        return true;
    }
    if (f.kind == StlKind::Globally && f.t_lo == 0.0 && std::abs(f.t_hi - dt) < 1e-12 &&
        f.lhs->is_atom_level()) {
        if (half_step) *half_step = 1;
        if (body) *body = f.lhs;
        return true;
    }
    if (f.kind != StlKind::Next) return false;
    long k;
    if (!grid_index(f.t_lo, &k)) return false;
    const StlFormula& c = *f.lhs;
    if (c.is_atom_level()) {
        if (half_step) *half_step = static_cast<int>(2 * k);
        if (body) *body = f.lhs;
        return true;
    }
    if (c.kind == StlKind::Globally && c.t_lo == 0.0 && std::abs(c.t_hi - dt) < 1e-12 &&
        c.lhs->is_atom_level()) {
        if (half_step) *half_step = static_cast<int>(2 * k + 1);
        if (body) *body = c.lhs;
        return true;
    }
    return false;
}

int sampled_horizon_steps(const StlPtr& sampled, double dt) {
    int half = 0;
    std::function<void(const StlFormula&)> walk = [&](const StlFormula& f) {
        int hs;
        if (match_sampled_literal(f, dt, &hs, nullptr)) {
            half = std::max(half, hs);
            return;
        }
        if (f.lhs) walk(*f.lhs);
        if (f.rhs) walk(*f.rhs);
    };
    walk(*sampled);
    return (half + 1) / 2;
}

// --- conjunctive normal form ----------------------------------------------

namespace {

struct CnfLiteral {
    int half_step;
    StlPtr body;
};

using CnfClause = std::vector<CnfLiteral>;

void merge_into_clause(CnfClause& clause, const CnfLiteral& lit) {
    for (CnfLiteral& l : clause) {
        if (l.half_step == lit.half_step) {
            l.body = StlFormula::disjunction(l.body, lit.body);
            return;
        }
    }
    clause.push_back(lit);
}

std::optional<std::vector<CnfClause>> cnf_rec(const StlPtr& f, double dt, std::size_t cap) {
    if (f->kind == StlKind::True) return std::vector<CnfClause>{};
    if (f->kind == StlKind::False) return std::vector<CnfClause>{CnfClause{}};

    CnfLiteral lit;
    if (match_sampled_literal(*f, dt, &lit.half_step, &lit.body))
        return std::vector<CnfClause>{CnfClause{lit}};

    if (f->kind == StlKind::And) {
        auto l = cnf_rec(f->lhs, dt, cap);
        auto r = cnf_rec(f->rhs, dt, cap);
        if (!l || !r) return std::nullopt;
        if (cap > 0 && l->size() + r->size() > cap) return std::nullopt;
        l->insert(l->end(), r->begin(), r->end());
        return l;
    }
    if (f->kind == StlKind::Or) {
        auto l = cnf_rec(f->lhs, dt, cap);
        auto r = cnf_rec(f->rhs, dt, cap);
        if (!l || !r) return std::nullopt;
        if (cap > 0 && l->size() * r->size() > cap) return std::nullopt;
        std::vector<CnfClause> out;
        out.reserve(l->size() * r->size());
        for (const CnfClause& c1 : *l) {
            for (const CnfClause& c2 : *r) {
                CnfClause merged = c1;
                for (const CnfLiteral& lit2 : c2) merge_into_clause(merged, lit2);
                out.push_back(std::move(merged));
            }
        }
        return out;
    }
    throw Error("to_cnf: input is not a sampled-time formula");
}

StlPtr rebuild(const std::vector<CnfClause>& clauses, double dt) {
    Expander ex{dt};
    StlPtr out = StlFormula::make_true();
    for (const CnfClause& clause : clauses) {
        StlPtr c = StlFormula::make_false();
        for (const CnfLiteral& lit : clause) {
            const StlPtr l = (lit.half_step % 2 == 0) ? ex.point_lit(lit.half_step / 2, lit.body)
                                                      : ex.interval_lit(lit.half_step / 2, lit.body);
            c = StlFormula::disjunction(c, l);
        }
        out = StlFormula::conjunction(out, c);
    }
    return out;
}

} // namespace

std::optional<StlPtr> try_to_cnf(const StlPtr& sampled, double dt, std::size_t clause_cap) {
    auto clauses = cnf_rec(sampled, dt, clause_cap);
    if (!clauses) return std::nullopt;
    return rebuild(*clauses, dt);
}

StlPtr to_cnf(const StlPtr& sampled, double dt) {
    auto out = try_to_cnf(sampled, dt, 0);
    return *out;  // cap 0 never fails
}

// --- checklist construction -------------------------------------------------

namespace {

Eigen::VectorXd pad_row(const Eigen::VectorXd& a, int n) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    out.head(a.size()) = a;
    return out;
}

// DNF of the closed complement of an atom-level body; each term is a list of
// (row, offset) halfspaces.
using HalfSpace = std::pair<Eigen::VectorXd, double>;
using DnfTerm = std::vector<HalfSpace>;

std::vector<DnfTerm> complement_dnf(const StlFormula& body, int n) {
    switch (body.kind) {
        case StlKind::True:
            return {};  // complement is empty
        case StlKind::False:
            return {DnfTerm{}};  // complement is the full space
        case StlKind::Atom: {
            if (max_state_index(body) > n)
                throw DimensionError("atom references a state index beyond the system dimension");
            // closed complement of a'x <= b (or <): -a'x <= -b
            return {DnfTerm{{pad_row(-body.atom_a, n), -body.atom_b}}};
        }
        case StlKind::And: {
            // !(l & r) = !l | !r
            auto l = complement_dnf(*body.lhs, n);
            auto r = complement_dnf(*body.rhs, n);
            l.insert(l.end(), r.begin(), r.end());
            return l;
        }
        case StlKind::Or: {
            // !(l | r) = !l & !r  ->  cross product of terms
            auto l = complement_dnf(*body.lhs, n);
            auto r = complement_dnf(*body.rhs, n);
            std::vector<DnfTerm> out;
            for (const DnfTerm& t1 : l) {
                for (const DnfTerm& t2 : r) {
                    DnfTerm merged = t1;
                    merged.insert(merged.end(), t2.begin(), t2.end());
                    out.push_back(std::move(merged));
                }
            }
            return out;
        }
        default:
            throw Error("checklist bodies must be atom-level formulas");
    }
}

Polytope term_to_polytope(const DnfTerm& term, int n) {
    Eigen::MatrixXd C(term.size(), n);
    Eigen::VectorXd d(term.size());
    for (size_t i = 0; i < term.size(); ++i) {
        C.row(static_cast<Eigen::Index>(i)) = term[i].first.transpose();
        d(static_cast<Eigen::Index>(i)) = term[i].second;
    }
    return {C, d};
}

} // namespace

std::vector<Polytope> body_complement_polytopes(const StlPtr& body, int state_dim) {
    std::vector<Polytope> out;
    for (const DnfTerm& term : complement_dnf(*body, state_dim))
        out.push_back(term_to_polytope(term, state_dim));
    return out;
}

RtlChecklist to_rtl_checklist(const StlPtr& phi_cnf, double dt, int state_dim) {
    RtlChecklist list;
    list.dt = dt;

    std::vector<StlPtr> clause_stack;
    std::function<void(const StlPtr&)> split_and = [&](const StlPtr& f) {
        if (f->kind == StlKind::And) {
            split_and(f->lhs);
            split_and(f->rhs);
        } else {
            clause_stack.push_back(f);
        }
    };

    if (phi_cnf->kind == StlKind::False) {
        list.always_false = true;
        return list;
    }
    if (phi_cnf->kind != StlKind::True) split_and(phi_cnf);

    for (const StlPtr& clause_f : clause_stack) {
        std::vector<StlPtr> lits;
        std::function<void(const StlPtr&)> split_or = [&](const StlPtr& f) {
            if (f->kind == StlKind::Or && !f->is_atom_level()) {
                split_or(f->lhs);
                split_or(f->rhs);
            } else {
                lits.push_back(f);
            }
        };
        split_or(clause_f);

        RtlClause clause;
        bool clause_true = false;
        for (const StlPtr& lit : lits) {
            RtlCheck check;
            StlPtr body;
            if (!match_sampled_literal(*lit, dt, &check.half_step, &body))
                throw Error("to_rtl_checklist: residual structure is not a sampled-time literal");
            if (body->kind == StlKind::True) {
                clause_true = true;
                break;
            }
            if (body->kind == StlKind::False) continue;  // check can never pass
            check.body = body;
            check.unsafe_polys = body_complement_polytopes(body, state_dim);
            list.num_steps = std::max(list.num_steps, (check.half_step + 1) / 2);
            clause.checks.push_back(std::move(check));
        }
        if (clause_true) continue;
        if (clause.checks.empty()) {
            list.always_false = true;
            continue;
        }
        list.clauses.push_back(std::move(clause));
    }
    return list;
}

} // namespace stlverify
