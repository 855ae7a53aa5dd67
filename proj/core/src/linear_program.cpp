#include "stlverify/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stlverify {

LinearProgram LinearProgram::feasibility(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    LinearProgram lp;
    const int n = static_cast<int>(A.cols());
    lp.c = Eigen::VectorXd::Zero(n);
    lp.A_ub = A;
    lp.b_ub = b;
    lp.A_eq.resize(0, n);
    lp.b_eq.resize(0);
    lp.lo = Eigen::VectorXd::Constant(n, -kInf);
    lp.hi = Eigen::VectorXd::Constant(n, kInf);
    return lp;
}

void LinearProgram::validate() const {
    const int n = num_vars();
    if (A_ub.rows() != b_ub.size() || (A_ub.rows() > 0 && A_ub.cols() != n))
        throw DimensionError("LinearProgram: inequality block shape mismatch");
    if (A_eq.rows() != b_eq.size() || (A_eq.rows() > 0 && A_eq.cols() != n))
        throw DimensionError("LinearProgram: equality block shape mismatch");
    if (lo.size() != n || hi.size() != n)
        throw DimensionError("LinearProgram: bounds size mismatch");
}

void LinearProgram::stacked_inequalities(Eigen::MatrixXd& A, Eigen::VectorXd& b) const {
    const int n = num_vars();
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    for (Eigen::Index i = 0; i < A_ub.rows(); ++i) {
        rows.push_back(A_ub.row(i));
        rhs.push_back(b_ub(i));
    }
    for (Eigen::Index i = 0; i < A_eq.rows(); ++i) {
        rows.push_back(A_eq.row(i));
        rhs.push_back(b_eq(i));
        rows.push_back(-A_eq.row(i));
        rhs.push_back(-b_eq(i));
    }
    for (int j = 0; j < n; ++j) {
        if (std::isfinite(lo(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            r(j) = -1.0;
            rows.push_back(r);
            rhs.push_back(-lo(j));
        }
        if (std::isfinite(hi(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
            r(j) = 1.0;
            rows.push_back(r);
            rhs.push_back(hi(j));
        }
    }
    A.resize(static_cast<Eigen::Index>(rows.size()), n);
    b.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        A.row(static_cast<Eigen::Index>(i)) = rows[i];
        b(static_cast<Eigen::Index>(i)) = rhs[i];
    }
}

namespace {

// Mapping from an original variable to nonnegative standard-form variables.
struct VarMap {
    enum Kind { ShiftLo, MirrorHi, Split } kind;
    int col = -1;   // primary standard column
    int col2 = -1;  // negative part for Split
    double offset = 0.0;
};

struct Standardized {
    Eigen::MatrixXd A;       // rows x ncols structural (vars + slacks)
    Eigen::VectorXd b;       // >= 0 after row flips
    Eigen::VectorXd cost;    // phase-2 cost over structural columns
    double cost_offset = 0;  // constant from bound shifts
    std::vector<VarMap> map; // per original variable
    int num_struct = 0;      // structural column count
    std::vector<int> slack_col;  // per row: slack column index or -1
};

constexpr double kPivTol = 1e-11;

// Full-tableau simplex over T (rows x (ncols+1), rhs in last column) with
// basis `basis`, minimizing `cost` over allowed columns. Bland's rule.
// Returns false if unbounded.
bool run_simplex(Eigen::MatrixXd& T, std::vector<int>& basis, const Eigen::VectorXd& cost,
                 const std::vector<bool>& allowed, long max_iters, double tol) {
    const Eigen::Index m = T.rows();
    const Eigen::Index ncols = T.cols() - 1;

    // reduced-cost row: r = cost - cost_B' * T
    Eigen::RowVectorXd r = cost.transpose();
    double z = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double cb = cost(basis[i]);
        if (cb != 0.0) {
            r -= cb * T.row(i).head(ncols);
            z -= cb * T(i, ncols);
        }
    }

    for (long iter = 0; iter < max_iters; ++iter) {
        // Bland: smallest-index improving column
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < ncols; ++j) {
            if (allowed[j] && r(j) < -tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return true;  // optimal

        // ratio test; Bland ties by smallest basis variable index
        Eigen::Index leave = -1;
        double best = kInf;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double a = T(i, enter);
            if (a > kPivTol) {
                const double ratio = T(i, ncols) / a;
                if (ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) return false;  // unbounded

        // pivot
        const double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i != leave) {
                const double f = T(i, enter);
                if (f != 0.0) T.row(i) -= f * T.row(leave);
            }
        }
        const double f = r(enter);
        if (f != 0.0) {
            r -= f * T.row(leave).head(ncols);
            z -= f * T(leave, ncols);
        }
        basis[leave] = static_cast<int>(enter);
    }
    throw LpError("simplex iteration cap exceeded (cycling guard)");
}

Standardized standardize(const LinearProgram& lp) {
    const int n = lp.num_vars();
    Standardized s;
    s.map.resize(n);

    // assign standard columns
    int col = 0;
    for (int j = 0; j < n; ++j) {
        const double lo = lp.lo(j), hi = lp.hi(j);
        if (std::isfinite(lo)) {
            s.map[j] = {VarMap::ShiftLo, col++, -1, lo};
        } else if (std::isfinite(hi)) {
            s.map[j] = {VarMap::MirrorHi, col++, -1, hi};
        } else {
            s.map[j] = {VarMap::Split, col, col + 1, 0.0};
            col += 2;
        }
    }
    const int nvars = col;

    // rows: A_ub, A_eq, finite upper bounds of shifted vars / lower bounds of mirrored vars
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    std::vector<bool> is_eq;

    auto to_std_row = [&](const Eigen::RowVectorXd& a, double b) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvars);
        double bb = b;
        for (int j = 0; j < n; ++j) {
            const double aj = a(j);
            if (aj == 0.0) continue;
            const VarMap& vm = s.map[j];
            switch (vm.kind) {
                case VarMap::ShiftLo:
                    r(vm.col) += aj;
                    bb -= aj * vm.offset;
                    break;
                case VarMap::MirrorHi:
                    r(vm.col) -= aj;
                    bb -= aj * vm.offset;
                    break;
                case VarMap::Split:
                    r(vm.col) += aj;
                    r(vm.col2) -= aj;
                    break;
            }
        }
        return std::make_pair(r, bb);
    };

    for (Eigen::Index i = 0; i < lp.A_ub.rows(); ++i) {
        auto [r, bb] = to_std_row(lp.A_ub.row(i), lp.b_ub(i));
        rows.push_back(r);
        rhs.push_back(bb);
        is_eq.push_back(false);
    }
    for (Eigen::Index i = 0; i < lp.A_eq.rows(); ++i) {
        auto [r, bb] = to_std_row(lp.A_eq.row(i), lp.b_eq(i));
        rows.push_back(r);
        rhs.push_back(bb);
        is_eq.push_back(true);
    }
    // residual finite bounds (the other side of shifted/mirrored variables)
    for (int j = 0; j < n; ++j) {
        const VarMap& vm = s.map[j];
        if (vm.kind == VarMap::ShiftLo && std::isfinite(lp.hi(j))) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nvars);
            r(vm.col) = 1.0;
            rows.push_back(r);
            rhs.push_back(lp.hi(j) - lp.lo(j));
            is_eq.push_back(false);
        }
        // MirrorHi with finite lo cannot happen (ShiftLo takes precedence)
    }

    const int m = static_cast<int>(rows.size());
    const int nslack = static_cast<int>(std::count(is_eq.begin(), is_eq.end(), false));
    s.num_struct = nvars + nslack;
    s.A.setZero(m, s.num_struct);
    s.b.resize(m);
    s.slack_col.assign(m, -1);

    int sc = nvars;
    for (int i = 0; i < m; ++i) {
        s.A.row(i).head(nvars) = rows[i];
        s.b(i) = rhs[i];
        if (!is_eq[i]) {
            s.A(i, sc) = 1.0;
            s.slack_col[i] = sc;
            ++sc;
        }
    }
    // make rhs nonnegative
    for (int i = 0; i < m; ++i) {
        if (s.b(i) < 0) {
            s.A.row(i) = -s.A.row(i);
            s.b(i) = -s.b(i);
        }
    }

    // phase-2 cost over structural columns
    s.cost = Eigen::VectorXd::Zero(s.num_struct);
    for (int j = 0; j < n; ++j) {
        const double cj = lp.c(j);
        if (cj == 0.0) continue;
        const VarMap& vm = s.map[j];
        switch (vm.kind) {
            case VarMap::ShiftLo:
                s.cost(vm.col) += cj;
                s.cost_offset += cj * vm.offset;
                break;
            case VarMap::MirrorHi:
                s.cost(vm.col) -= cj;
                s.cost_offset += cj * vm.offset;
                break;
            case VarMap::Split:
                s.cost(vm.col) += cj;
                s.cost(vm.col2) -= cj;
                break;
        }
    }
    return s;
}

} // namespace

LpResult lp_solve(const LinearProgram& lp, const LpOptions& opts) {
    lp.validate();
    const int n = lp.num_vars();
    for (int j = 0; j < n; ++j) {
        if (lp.lo(j) > lp.hi(j)) {
            LpResult res;
            res.status = LpStatus::Infeasible;
            return res;
        }
    }

    Standardized s = standardize(lp);
    const int m = static_cast<int>(s.A.rows());
    const int nstruct = s.num_struct;
    const double tol = opts.tol;
    const long max_iters =
        opts.max_iters > 0 ? opts.max_iters : 4000 + 200L * (m + nstruct);

    // tableau with artificial columns where the slack cannot serve as basis
    std::vector<int> art_col(m, -1);
    int nart = 0;
    for (int i = 0; i < m; ++i) {
        const int sc = s.slack_col[i];
        if (sc >= 0 && s.A(i, sc) > 0.5) continue;  // slack usable (row not flipped)
        art_col[i] = nstruct + nart++;
    }

    const int ncols = nstruct + nart;
    Eigen::MatrixXd T(m, ncols + 1);
    T.setZero();
    T.leftCols(nstruct) = s.A;
    T.col(ncols) = s.b;
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        if (art_col[i] >= 0) {
            T(i, art_col[i]) = 1.0;
            basis[i] = art_col[i];
        } else {
            basis[i] = s.slack_col[i];
        }
    }

    std::vector<bool> allowed(ncols, true);
    LpResult res;

    if (nart > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols);
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0) phase1(art_col[i]) = 1.0;
        if (!run_simplex(T, basis, phase1, allowed, max_iters, tol))
            throw LpError("phase-1 reported unbounded");  // cannot happen

        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[i] >= nstruct) infeas += T(i, ncols);
        if (infeas > 1e-7) {
            res.status = LpStatus::Infeasible;
            if (opts.want_certificate) {
                // Farkas: find y >= 0 with y'A = 0 and y'b = -1 over the
                // stacked inequality system.
                Eigen::MatrixXd As;
                Eigen::VectorXd bs;
                lp.stacked_inequalities(As, bs);
                const int q = static_cast<int>(As.rows());
                LinearProgram dual;
                dual.c = Eigen::VectorXd::Zero(q);
                dual.A_ub.resize(0, q);
                dual.b_ub.resize(0);
                dual.A_eq.resize(As.cols() + 1, q);
                dual.A_eq.topRows(As.cols()) = As.transpose();
                dual.A_eq.row(As.cols()) = bs.transpose();
                dual.b_eq = Eigen::VectorXd::Zero(As.cols() + 1);
                dual.b_eq(As.cols()) = -1.0;
                dual.lo = Eigen::VectorXd::Zero(q);
                dual.hi = Eigen::VectorXd::Constant(q, kInf);
                LpOptions o2;
                o2.tol = tol;
                LpResult far = lp_solve(dual, o2);
                if (far.status == LpStatus::Optimal) res.farkas = far.x;
            }
            return res;
        }
        // drive remaining (degenerate) artificials out of the basis
        for (int i = 0; i < m; ++i) {
            if (basis[i] < nstruct) continue;
            Eigen::Index piv = -1;
            for (Eigen::Index j = 0; j < nstruct; ++j) {
                if (std::abs(T(i, j)) > 1e-9) {
                    piv = j;
                    break;
                }
            }
            if (piv < 0) continue;  // redundant row; keep, it stays zero
            const double p = T(i, piv);
            T.row(i) /= p;
            for (int k = 0; k < m; ++k) {
                if (k != i) {
                    const double f = T(k, piv);
                    if (f != 0.0) T.row(k) -= f * T.row(i);
                }
            }
            basis[i] = static_cast<int>(piv);
        }
        for (int j = nstruct; j < ncols; ++j) allowed[j] = false;
    }

    Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(ncols);
    cost2.head(nstruct) = s.cost;
    if (!run_simplex(T, basis, cost2, allowed, max_iters, tol)) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    // recover solution
    Eigen::VectorXd y = Eigen::VectorXd::Zero(ncols);
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= nstruct && T(i, ncols) > 1e-7)
            throw LpError("artificial variable stuck in basis");
        y(basis[i]) = T(i, ncols);
    }
    res.x.resize(n);
    for (int j = 0; j < n; ++j) {
        const VarMap& vm = s.map[j];
        switch (vm.kind) {
            case VarMap::ShiftLo: res.x(j) = vm.offset + y(vm.col); break;
            case VarMap::MirrorHi: res.x(j) = vm.offset - y(vm.col); break;
            case VarMap::Split: res.x(j) = y(vm.col) - y(vm.col2); break;
        }
    }
    res.objective = lp.c.size() > 0 ? lp.c.dot(res.x) : 0.0;
    res.status = LpStatus::Optimal;
    return res;
}

} // namespace stlverify
