#include "stlverify/milp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace stlverify {

Eigen::VectorXd CounterexampleMilp::margins(const Eigen::VectorXd& alpha,
                                            const std::vector<int>& rows) const {
    if (rows.size() != safe_sets.size()) throw DimensionError("margins: one row per polytope");
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j) {
        const Polytope& K = safe_sets[j];
        out(static_cast<Eigen::Index>(j)) = K.C.row(rows[j]).dot(alpha) - K.d(rows[j]);
    }
    return out;
}

bool CounterexampleMilp::validate(const Eigen::VectorXd& alpha, const std::vector<int>& rows,
                                  double tol) const {
    if (alpha.size() != p) return false;
    if (alpha.cwiseAbs().maxCoeff() > 1.0 + tol) return false;
    const Eigen::VectorXd m = margins(alpha, rows);
    return (m.array() >= epsilon * (1.0 - 1e-9) - tol).all();
}

namespace {

// Relaxation at a node: minimize ||alpha||_1 over the box subject to the rows
// fixed so far being violated by at least epsilon. Polytopes not yet branched
// on are dropped, which only relaxes the problem.
LpResult node_relaxation(const CounterexampleMilp& milp,
                         const std::vector<std::pair<int, int>>& fixed, double lp_tol) {
    const int p = milp.p;
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(2 * p);
    lp.c.tail(p).setOnes();  // minimize sum of t with |alpha_i| <= t_i

    const int nfixed = static_cast<int>(fixed.size());
    lp.A_ub = Eigen::MatrixXd::Zero(2 * p + nfixed, 2 * p);
    lp.b_ub = Eigen::VectorXd::Zero(2 * p + nfixed);
    for (int i = 0; i < p; ++i) {
        lp.A_ub(2 * i, i) = 1.0;  // alpha_i - t_i <= 0
        lp.A_ub(2 * i, p + i) = -1.0;
        lp.A_ub(2 * i + 1, i) = -1.0;  // -alpha_i - t_i <= 0
        lp.A_ub(2 * i + 1, p + i) = -1.0;
    }
    for (int k = 0; k < nfixed; ++k) {
        const auto [j, row] = fixed[k];
        const Polytope& K = milp.safe_sets[j];
        lp.A_ub.row(2 * p + k).head(p) = -K.C.row(row);
        lp.b_ub(2 * p + k) = -(K.d(row) + milp.epsilon);
    }
    lp.A_eq.resize(0, 2 * p);
    lp.b_eq.resize(0);
    lp.lo = Eigen::VectorXd::Constant(2 * p, -1.0);
    lp.lo.tail(p).setZero();
    lp.hi = Eigen::VectorXd::Constant(2 * p, 1.0);

    LpOptions opts;
    opts.tol = lp_tol;
    return lp_solve(lp, opts);
}

} // namespace

MilpResult milp_branch_and_bound(const CounterexampleMilp& milp, const MilpOptions& opts) {
    MilpResult best;
    best.status = MilpStatus::Infeasible;
    double incumbent = kInf;
    long nodes = 0;
    bool capped = false;

    std::vector<std::pair<int, int>> fixed;
    fixed.reserve(milp.safe_sets.size());

    std::function<void(int)> dfs = [&](int depth) {
        if (capped) return;
        if (++nodes > opts.node_cap) {
            capped = true;
            return;
        }
        const LpResult relax = node_relaxation(milp, fixed, opts.lp_tol);
        if (relax.status != LpStatus::Optimal) return;  // infeasible branch
        if (relax.objective > incumbent - 1e-9) return; // cannot improve

        if (depth == static_cast<int>(milp.safe_sets.size())) {
            incumbent = relax.objective;
            best.status = MilpStatus::Feasible;
            best.alpha = relax.x.head(milp.p);
            best.objective = relax.objective;
            best.chosen_rows.resize(fixed.size());
            for (size_t k = 0; k < fixed.size(); ++k) best.chosen_rows[k] = fixed[k].second;
            return;
        }

        // order the rows of the next polytope by violation under the
        // relaxation point (most promising first)
        const Polytope& K = milp.safe_sets[depth];
        const Eigen::VectorXd alpha = relax.x.head(milp.p);
        std::vector<int> order(K.num_rows());
        std::iota(order.begin(), order.end(), 0);
        Eigen::VectorXd score(K.num_rows());
        for (int r = 0; r < K.num_rows(); ++r) {
            const double nrm = std::max(K.C.row(r).norm(), 1e-12);
            score(r) = (K.C.row(r).dot(alpha) - K.d(r)) / nrm;
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) { return score(a) > score(b); });

        for (int r : order) {
            fixed.emplace_back(depth, r);
            dfs(depth + 1);
            fixed.pop_back();
            if (capped) return;
        }
    };

    dfs(0);
    best.nodes = nodes;
    if (capped && best.status != MilpStatus::Feasible) best.status = MilpStatus::NodeCapExceeded;
    return best;
}

MilpResult find_counterexample(const UnsafeList& safe, int p, const MilpOptions& opts) {
    MilpResult res;
    if (safe.empty()) {
        res.status = MilpStatus::Feasible;
        res.alpha = Eigen::VectorXd::Zero(p);
        res.objective = 0.0;
        return res;
    }

    // strip rows that coincide with factor-box faces; they cannot be violated
    // by any alpha in the box
    auto is_box_row = [&](const Eigen::RowVectorXd& row, double d) {
        if (std::abs(d - 1.0) > 1e-12) return false;
        int nz = -1;
        for (int i = 0; i < row.size(); ++i) {
            if (row(i) != 0.0) {
                if (nz >= 0) return false;
                if (std::abs(std::abs(row(i)) - 1.0) > 1e-12) return false;
                nz = i;
            }
        }
        return nz >= 0;
    };

    CounterexampleMilp milp;
    milp.p = p;
    milp.epsilon = opts.epsilon + 1e-9;  // keep the validated margin above epsilon
    for (const Polytope& K : safe.polys) {
        if (K.dim() != p) throw DimensionError("find_counterexample: factor dimension mismatch");
        std::vector<int> keep;
        for (int r = 0; r < K.num_rows(); ++r) {
            if (!is_box_row(K.C.row(r), K.d(r))) keep.push_back(r);
        }
        if (keep.empty()) {
            res.status = MilpStatus::Infeasible;  // polytope covers the whole box
            return res;
        }
        Eigen::MatrixXd C(keep.size(), p);
        Eigen::VectorXd d(keep.size());
        for (size_t i = 0; i < keep.size(); ++i) {
            C.row(static_cast<Eigen::Index>(i)) = K.C.row(keep[i]);
            d(static_cast<Eigen::Index>(i)) = K.d(keep[i]);
        }
        milp.safe_sets.emplace_back(std::move(C), std::move(d));
    }

    return milp_branch_and_bound(milp, opts);
}

} // namespace stlverify
