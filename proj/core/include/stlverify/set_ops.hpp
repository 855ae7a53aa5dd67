#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stlverify/errors.hpp"
#include "stlverify/linear_program.hpp"

namespace stlverify {

/// Zonotope Z = { c + G*alpha | alpha in [-1,1]^gens }. A zonotope with no
/// generators is a point; all operations accept that case.
struct Zonotope {
    Eigen::VectorXd c;
    Eigen::MatrixXd G;

    Zonotope() = default;
    Zonotope(Eigen::VectorXd center, Eigen::MatrixXd generators);

    static Zonotope point(const Eigen::VectorXd& p);
    /// Axis-aligned box [center - radius, center + radius]; zero-radius axes
    /// contribute no generator.
    static Zonotope box(const Eigen::VectorXd& center, const Eigen::VectorXd& radius);

    int dim() const { return static_cast<int>(c.size()); }
    int num_generators() const { return static_cast<int>(G.cols()); }
};

/// Polytope P = { x | C x <= d } in halfspace representation. s = 0 rows is
/// the full space.
struct Polytope {
    Eigen::MatrixXd C;
    Eigen::VectorXd d;

    Polytope() = default;
    Polytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets);

    static Polytope full_space(int n);
    /// Single halfspace a'x <= b.
    static Polytope halfspace(const Eigen::VectorXd& a, double b);
    /// Box lo <= x <= hi.
    static Polytope axis_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

    int dim() const { return static_cast<int>(C.cols()); }
    int num_rows() const { return static_cast<int>(C.rows()); }
    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

struct Interval {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Interval() = default;
    Interval(Eigen::VectorXd lower, Eigen::VectorXd upper);

    int dim() const { return static_cast<int>(lo.size()); }
    Eigen::VectorXd mid() const { return 0.5 * (lo + hi); }
    Eigen::VectorXd rad() const { return 0.5 * (hi - lo); }
    bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
    Zonotope to_zonotope() const { return Zonotope::box(mid(), rad()); }
};

/// Matrix with elementwise bounds [lo, hi].
struct IntervalMatrix {
    Eigen::MatrixXd lo;
    Eigen::MatrixXd hi;

    IntervalMatrix() = default;
    IntervalMatrix(Eigen::MatrixXd lower, Eigen::MatrixXd upper);

    static IntervalMatrix zero(Eigen::Index rows, Eigen::Index cols);
    static IntervalMatrix exact(const Eigen::MatrixXd& M) { return {M, M}; }
    /// Symmetric interval [-E, E] (E must be elementwise nonnegative).
    static IntervalMatrix symmetric(const Eigen::MatrixXd& E);
    /// [a, b] * M for a scalar interval [a, b].
    static IntervalMatrix scalar_interval_times(double a, double b, const Eigen::MatrixXd& M);

    Eigen::Index rows() const { return lo.rows(); }
    Eigen::Index cols() const { return lo.cols(); }
    Eigen::MatrixXd mid() const { return 0.5 * (lo + hi); }
    Eigen::MatrixXd rad() const { return 0.5 * (hi - lo); }

    IntervalMatrix operator+(const IntervalMatrix& o) const;
    /// Interval matrix times exact matrix.
    IntervalMatrix operator*(const Eigen::MatrixXd& M) const;
    /// Scale by a nonnegative scalar.
    IntervalMatrix scaled(double s) const;
};

// --- zonotope operations ----------------------------------------------------

/// Exact linear map <M c, M G>.
Zonotope zono_linear_map(const Eigen::MatrixXd& M, const Zonotope& Z);

/// Exact Minkowski sum <c1 + c2, [G1 G2]>.
Zonotope zono_minkowski_sum(const Zonotope& Z1, const Zonotope& Z2);

/// Enclosure of conv(Z1, Z2). When the generator counts match the layout is
/// [0.5(G1+G2)  0.5(G1-G2)  0.5(c1-c2)]; the zonotope with fewer generators
/// is padded per-column, extra columns of the larger one pass through.
Zonotope zono_convex_hull_enclosure(const Zonotope& Z1, const Zonotope& Z2);

/// Tightest axis-aligned box [c - sum|G_i|, c + sum|G_i|].
Interval zono_interval_enclosure(const Zonotope& Z);

/// Enclosure of { M x | M in [lo,hi], x in Z } via the midpoint-radius split
/// <Mc c, [Mc G  diag(R (|c| + sum_i |G_i|))]> with Mc = mid, R = rad.
Zonotope imat_zono_product_enclosure(const IntervalMatrix& M, const Zonotope& Z);

/// Membership c + G a = x for some a in [-1,1]^gens, decided by LP.
bool zono_contains_point(const Zonotope& Z, const Eigen::VectorXd& x, double tol = 1e-9);

// --- polytope operations ----------------------------------------------------

/// Exact intersection <[C1;C2],[d1;d2]>.
Polytope poly_intersection(const Polytope& P1, const Polytope& P2);

/// True iff { x | C x <= d } is empty (one LP feasibility problem).
bool poly_is_empty(const Polytope& P, double tol = 1e-8);

/// Same set with redundant rows removed; each kept row is certified by an LP
/// whose optimum exceeds the row offset when the row is dropped.
Polytope poly_remove_redundant(const Polytope& P, double tol = 1e-9);

/// True iff Z intersects P, via an LP over the zonotope factors.
bool zono_poly_intersects(const Zonotope& Z, const Polytope& P, double tol = 1e-8);

/// Vertices of the shadow of Z on the (dim_x, dim_y) plane, counterclockwise.
/// Exact for zonotope projections (generator angle sweep).
std::vector<Eigen::Vector2d> zono_shadow_polygon(const Zonotope& Z, int dim_x, int dim_y);

// --- interval matrices -------------------------------------------------------

/// ||M||_F = sqrt(sum_ij max(|lo_ij|, |hi_ij|)^2); exact Frobenius norm for
/// degenerate intervals.
double imat_frobenius_norm(const IntervalMatrix& M);

} // namespace stlverify
