#include <doctest.h>

#include "stlverify/linear_program.hpp"
#include "support/oracles.hpp"

using namespace stlverify;

namespace {

LinearProgram make_free(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                        const Eigen::VectorXd& b) {
    LinearProgram lp = LinearProgram::feasibility(A, b);
    lp.c = c;
    return lp;
}

} // namespace

TEST_CASE("bounded one-dimensional problems") {
    // min x s.t. x >= 1, x <= 2
    Eigen::MatrixXd A(2, 1);
    A << -1, 1;
    Eigen::VectorXd b(2);
    b << -1, 2;
    Eigen::VectorXd c(1);
    c << 1;

    const LpResult r = lp_solve(make_free(c, A, b));
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(1.0));
    CHECK(r.objective == doctest::Approx(1.0));

    // maximize instead
    const LpResult r2 = lp_solve(make_free(-c, A, b));
    REQUIRE(r2.status == LpStatus::Optimal);
    CHECK(r2.x(0) == doctest::Approx(2.0));
}

TEST_CASE("infeasible system x <= -1 and x >= 1") {
    Eigen::MatrixXd A(2, 1);
    A << 1, -1;
    Eigen::VectorXd b(2);
    b << -1, -1;
    const LpResult r = lp_solve(LinearProgram::feasibility(A, b));
    CHECK(r.status == LpStatus::Infeasible);
}

TEST_CASE("unbounded objective is detected") {
    Eigen::MatrixXd A(1, 1);
    A << 1;
    Eigen::VectorXd b(1);
    b << 5;
    Eigen::VectorXd c(1);
    c << 1;  // min x with only x <= 5: unbounded below
    const LpResult r = lp_solve(make_free(c, A, b));
    CHECK(r.status == LpStatus::Unbounded);
}

TEST_CASE("variable bounds and equalities") {
    // min -x - y s.t. x + y = 1, x in [0, 0.3], y free with y <= 2
    LinearProgram lp;
    lp.c.resize(2);
    lp.c << -1, -1;
    lp.A_ub.resize(1, 2);
    lp.A_ub << 0, 1;
    lp.b_ub.resize(1);
    lp.b_ub << 2;
    lp.A_eq.resize(1, 2);
    lp.A_eq << 1, 1;
    lp.b_eq.resize(1);
    lp.b_eq << 1;
    lp.lo.resize(2);
    lp.lo << 0, -kInf;
    lp.hi.resize(2);
    lp.hi << 0.3, kInf;

    const LpResult r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-1.0));
    CHECK((lp.A_eq * r.x - lp.b_eq).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(r.x(0) <= 0.3 + 1e-9);
}

TEST_CASE("farkas certificate on request") {
    // x >= 2 and x <= 1 with bounds
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(1);
    lp.A_ub.resize(2, 1);
    lp.A_ub << -1, 1;
    lp.b_ub.resize(2);
    lp.b_ub << -2, 1;
    lp.A_eq.resize(0, 1);
    lp.b_eq.resize(0);
    lp.lo = Eigen::VectorXd::Constant(1, -kInf);
    lp.hi = Eigen::VectorXd::Constant(1, kInf);

    LpOptions opts;
    opts.want_certificate = true;
    const LpResult r = lp_solve(lp, opts);
    REQUIRE(r.status == LpStatus::Infeasible);
    REQUIRE(r.farkas.size() > 0);

    Eigen::MatrixXd As;
    Eigen::VectorXd bs;
    lp.stacked_inequalities(As, bs);
    CHECK(r.farkas.minCoeff() >= -1e-9);
    CHECK((r.farkas.transpose() * As).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(r.farkas.dot(bs) < -1e-8);
}

TEST_CASE("random dense problems match the textbook oracle") {
    std::mt19937_64 rng(20240811);
    int optimal = 0, infeasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 20);
        const int m = 1 + static_cast<int>(rng() % 25);
        const Eigen::MatrixXd A = oracles::random_matrix(rng, m, n);
        const Eigen::VectorXd b = oracles::random_vector(rng, m);
        const Eigen::VectorXd c = oracles::random_vector(rng, n);

        // box the variables through rows so the oracle sees the same problem
        Eigen::MatrixXd Abox(m + 2 * n, n);
        Eigen::VectorXd bbox(m + 2 * n);
        Abox.topRows(m) = A;
        bbox.head(m) = b;
        Abox.middleRows(m, n) = Eigen::MatrixXd::Identity(n, n);
        bbox.segment(m, n).setConstant(3.0);
        Abox.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
        bbox.tail(n).setConstant(3.0);

        const LpResult mine = lp_solve(make_free(c, Abox, bbox));
        const oracles::RefResult ref = oracles::reference_lp(c, Abox, bbox);

        if (ref.status == oracles::RefStatus::Optimal) {
            ++optimal;
            REQUIRE(mine.status == LpStatus::Optimal);
            CHECK(mine.objective == doctest::Approx(ref.objective).epsilon(1e-6));
            CHECK(((Abox * mine.x - bbox).array() <= 1e-8).all());
        } else if (ref.status == oracles::RefStatus::Infeasible) {
            ++infeasible;
            CHECK(mine.status == LpStatus::Infeasible);
        }
    }
    CHECK(optimal > 50);
    CHECK(infeasible > 10);
}
