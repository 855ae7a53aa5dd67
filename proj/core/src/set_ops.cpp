#include "stlverify/set_ops.hpp"

#include <cmath>
#include <vector>

namespace stlverify {

Zonotope::Zonotope(Eigen::VectorXd center, Eigen::MatrixXd generators)
    : c(std::move(center)), G(std::move(generators)) {
    if (G.size() == 0 && G.rows() != c.size()) G.resize(c.size(), 0);
    if (G.rows() != c.size())
        throw DimensionError("Zonotope: generator rows must match center size");
}

Zonotope Zonotope::point(const Eigen::VectorXd& p) {
    return {p, Eigen::MatrixXd::Zero(p.size(), 0)};
}

Zonotope Zonotope::box(const Eigen::VectorXd& center, const Eigen::VectorXd& radius) {
    if (center.size() != radius.size())
        throw DimensionError("Zonotope::box: center/radius size mismatch");
    const Eigen::Index n = center.size();
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (radius(i) != 0.0) ++k;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, k);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (radius(i) != 0.0) G(i, col++) = radius(i);
    }
    return {center, G};
}

Polytope::Polytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets)
    : C(std::move(normals)), d(std::move(offsets)) {
    if (C.rows() != d.size())
        throw DimensionError("Polytope: row count of C must match d");
}

Polytope Polytope::full_space(int n) {
    return {Eigen::MatrixXd::Zero(0, n), Eigen::VectorXd::Zero(0)};
}

Polytope Polytope::halfspace(const Eigen::VectorXd& a, double b) {
    Eigen::MatrixXd C(1, a.size());
    C.row(0) = a.transpose();
    Eigen::VectorXd d(1);
    d(0) = b;
    return {C, d};
}

Polytope Polytope::axis_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    if (lo.size() != hi.size()) throw DimensionError("Polytope::axis_box: size mismatch");
    const Eigen::Index n = lo.size();
    Eigen::MatrixXd C(2 * n, n);
    C.setZero();
    Eigen::VectorXd d(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        C(2 * i, i) = 1.0;
        d(2 * i) = hi(i);
        C(2 * i + 1, i) = -1.0;
        d(2 * i + 1) = -lo(i);
    }
    return {C, d};
}

bool Polytope::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != dim()) throw DimensionError("Polytope::contains: dimension mismatch");
    if (num_rows() == 0) return true;
    return ((C * x - d).array() <= tol).all();
}

Interval::Interval(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw DimensionError("Interval: bound size mismatch");
    if ((lo.array() > hi.array() + 1e-12).any())
        throw Error("Interval: lower bound exceeds upper bound");
}

bool Interval::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != dim()) throw DimensionError("Interval::contains: dimension mismatch");
    return ((x - lo).array() >= -tol).all() && ((hi - x).array() >= -tol).all();
}

IntervalMatrix::IntervalMatrix(Eigen::MatrixXd lower, Eigen::MatrixXd upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.rows() != hi.rows() || lo.cols() != hi.cols())
        throw DimensionError("IntervalMatrix: bound shape mismatch");
}

IntervalMatrix IntervalMatrix::zero(Eigen::Index rows, Eigen::Index cols) {
    return {Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols)};
}

IntervalMatrix IntervalMatrix::symmetric(const Eigen::MatrixXd& E) {
    return {-E, E};
}

IntervalMatrix IntervalMatrix::scalar_interval_times(double a, double b, const Eigen::MatrixXd& M) {
    Eigen::MatrixXd lo(M.rows(), M.cols()), hi(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            const double m = M(i, j);
            const double v1 = a * m, v2 = b * m;
            lo(i, j) = std::min(v1, v2);
            hi(i, j) = std::max(v1, v2);
        }
    }
    return {lo, hi};
}

IntervalMatrix IntervalMatrix::operator+(const IntervalMatrix& o) const {
    if (rows() != o.rows() || cols() != o.cols())
        throw DimensionError("IntervalMatrix: addition shape mismatch");
    return {lo + o.lo, hi + o.hi};
}

IntervalMatrix IntervalMatrix::operator*(const Eigen::MatrixXd& M) const {
    if (cols() != M.rows()) throw DimensionError("IntervalMatrix: product shape mismatch");
    const Eigen::MatrixXd Mpos = M.cwiseMax(0.0);
    const Eigen::MatrixXd Mneg = M.cwiseMin(0.0);
    return {lo * Mpos + hi * Mneg, hi * Mpos + lo * Mneg};
}

IntervalMatrix IntervalMatrix::scaled(double s) const {
    if (s < 0) throw Error("IntervalMatrix::scaled: negative factor");
    return {s * lo, s * hi};
}

// --- zonotope operations ----------------------------------------------------

Zonotope zono_linear_map(const Eigen::MatrixXd& M, const Zonotope& Z) {
    if (M.cols() != Z.dim()) throw DimensionError("zono_linear_map: dimension mismatch");
    return {M * Z.c, M * Z.G};
}

Zonotope zono_minkowski_sum(const Zonotope& Z1, const Zonotope& Z2) {
    if (Z1.dim() != Z2.dim()) throw DimensionError("zono_minkowski_sum: dimension mismatch");
    Eigen::MatrixXd G(Z1.dim(), Z1.num_generators() + Z2.num_generators());
    G << Z1.G, Z2.G;
    return {Z1.c + Z2.c, G};
}

Zonotope zono_convex_hull_enclosure(const Zonotope& Z1in, const Zonotope& Z2in) {
    if (Z1in.dim() != Z2in.dim())
        throw DimensionError("zono_convex_hull_enclosure: dimension mismatch");
    // the construction assumes the second operand has at least as many generators
    const bool swap = Z1in.num_generators() > Z2in.num_generators();
    const Zonotope& Z1 = swap ? Z2in : Z1in;
    const Zonotope& Z2 = swap ? Z1in : Z2in;

    const int n = Z1.dim();
    const int g1 = Z1.num_generators();
    const int g2 = Z2.num_generators();
    const Eigen::MatrixXd G2head = Z2.G.leftCols(g1);
    const Eigen::MatrixXd G2tail = Z2.G.rightCols(g2 - g1);

    Eigen::MatrixXd G(n, g1 + g1 + 1 + (g2 - g1));
    G << 0.5 * (Z1.G + G2head), 0.5 * (Z1.G - G2head), 0.5 * (Z1.c - Z2.c), G2tail;
    return {0.5 * (Z1.c + Z2.c), G};
}

Interval zono_interval_enclosure(const Zonotope& Z) {
    const Eigen::VectorXd r = Z.G.cwiseAbs().rowwise().sum();
    return {Z.c - r, Z.c + r};
}

Zonotope imat_zono_product_enclosure(const IntervalMatrix& M, const Zonotope& Z) {
    if (M.cols() != Z.dim())
        throw DimensionError("imat_zono_product_enclosure: dimension mismatch");
    const Eigen::MatrixXd Mc = M.mid();
    const Eigen::MatrixXd R = M.rad();
    const Eigen::VectorXd reach = Z.c.cwiseAbs() + Z.G.cwiseAbs().rowwise().sum();
    const Eigen::VectorXd slack = R * reach;

    const Zonotope mapped = zono_linear_map(Mc, Z);
    return zono_minkowski_sum(mapped, Zonotope::box(Eigen::VectorXd::Zero(M.rows()), slack));
}

bool zono_contains_point(const Zonotope& Z, const Eigen::VectorXd& x, double tol) {
    if (x.size() != Z.dim()) throw DimensionError("zono_contains_point: dimension mismatch");
    const int g = Z.num_generators();
    if (g == 0) return (Z.c - x).lpNorm<Eigen::Infinity>() <= tol;

    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(g);
    lp.A_ub.resize(0, g);
    lp.b_ub.resize(0);
    lp.A_eq = Z.G;
    lp.b_eq = x - Z.c;
    lp.lo = Eigen::VectorXd::Constant(g, -1.0 - tol);
    lp.hi = Eigen::VectorXd::Constant(g, 1.0 + tol);
    return lp_solve(lp).status == LpStatus::Optimal;
}

// --- polytope operations ----------------------------------------------------

Polytope poly_intersection(const Polytope& P1, const Polytope& P2) {
    if (P1.dim() != P2.dim()) throw DimensionError("poly_intersection: dimension mismatch");
    Eigen::MatrixXd C(P1.num_rows() + P2.num_rows(), P1.dim());
    C << P1.C, P2.C;
    Eigen::VectorXd d(P1.num_rows() + P2.num_rows());
    d << P1.d, P2.d;
    return {C, d};
}

bool poly_is_empty(const Polytope& P, double tol) {
    if (P.num_rows() == 0) return false;
    LpOptions opts;
    opts.tol = tol;
    const LpResult r = lp_solve(LinearProgram::feasibility(P.C, P.d), opts);
    return r.status == LpStatus::Infeasible;
}

Polytope poly_remove_redundant(const Polytope& P, double tol) {
    const int n = P.dim();
    std::vector<bool> keep(P.num_rows(), true);

    for (int r = 0; r < P.num_rows(); ++r) {
        // maximize C_r x subject to the remaining rows; r is redundant iff
        // the optimum stays below its offset
        std::vector<int> others;
        for (int i = 0; i < P.num_rows(); ++i)
            if (i != r && keep[i]) others.push_back(i);

        LinearProgram lp;
        lp.c = -P.C.row(r).transpose();  // maximize C_r x
        lp.A_ub.resize(others.size() + 1, n);
        lp.b_ub.resize(others.size() + 1);
        for (size_t i = 0; i < others.size(); ++i) {
            lp.A_ub.row(i) = P.C.row(others[i]);
            lp.b_ub(i) = P.d(others[i]);
        }
        // cap the objective so the LP stays bounded
        lp.A_ub.row(others.size()) = P.C.row(r);
        lp.b_ub(others.size()) = P.d(r) + 1.0;
        lp.lo = Eigen::VectorXd::Constant(n, -kInf);
        lp.hi = Eigen::VectorXd::Constant(n, kInf);

        const LpResult res = lp_solve(lp);
        if (res.status == LpStatus::Infeasible) return P;  // empty set: leave untouched
        if (res.status == LpStatus::Optimal && -res.objective <= P.d(r) + tol)
            keep[r] = false;
    }

    int kept = 0;
    for (bool k : keep) kept += k;
    Eigen::MatrixXd C(kept, n);
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

bool zono_poly_intersects(const Zonotope& Z, const Polytope& P, double tol) {
    if (Z.dim() != P.dim()) throw DimensionError("zono_poly_intersects: dimension mismatch");
    if (P.num_rows() == 0) return true;
    const int g = Z.num_generators();
    if (g == 0) return P.contains(Z.c, tol);

    // feasibility of C (c + G a) <= d over a in [-1,1]^g
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(g);
    lp.A_ub = P.C * Z.G;
    lp.b_ub = P.d - P.C * Z.c;
    lp.A_eq.resize(0, g);
    lp.b_eq.resize(0);
    lp.lo = Eigen::VectorXd::Constant(g, -1.0);
    lp.hi = Eigen::VectorXd::Constant(g, 1.0);
    LpOptions opts;
    opts.tol = tol;
    return lp_solve(lp, opts).status == LpStatus::Optimal;
}

std::vector<Eigen::Vector2d> zono_shadow_polygon(const Zonotope& Z, int dim_x, int dim_y) {
    if (dim_x < 0 || dim_y < 0 || dim_x >= Z.dim() || dim_y >= Z.dim() || dim_x == dim_y)
        throw DimensionError("zono_shadow_polygon: invalid projection dimensions");

    const Eigen::Vector2d c(Z.c(dim_x), Z.c(dim_y));
    std::vector<Eigen::Vector2d> gens;
    for (int j = 0; j < Z.num_generators(); ++j) {
        Eigen::Vector2d g(Z.G(dim_x, j), Z.G(dim_y, j));
        if (g.norm() < 1e-14) continue;
        if (g.y() < 0 || (g.y() == 0 && g.x() < 0)) g = -g;  // upper half plane
        gens.push_back(g);
    }
    if (gens.empty()) return {c};

    std::sort(gens.begin(), gens.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
    });

    // start at the vertex with every normalized generator at -1, then walk
    // the upper chain flipping one generator at a time; mirror for the rest
    Eigen::Vector2d v = c;
    for (const Eigen::Vector2d& g : gens) v -= g;

    std::vector<Eigen::Vector2d> poly;
    poly.push_back(v);
    for (const Eigen::Vector2d& g : gens) {
        v += 2.0 * g;
        poly.push_back(v);
    }
    const size_t half = poly.size();
    for (size_t i = 1; i + 1 < half; ++i) poly.push_back(2.0 * c - poly[i]);
    return poly;
}

double imat_frobenius_norm(const IntervalMatrix& M) {
    const Eigen::MatrixXd mag = M.lo.cwiseAbs().cwiseMax(M.hi.cwiseAbs());
    return std::sqrt(mag.array().square().sum());
}

} // namespace stlverify
