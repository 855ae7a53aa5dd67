#include <doctest.h>

#include "stlverify/milp.hpp"
#include "support/oracles.hpp"

using namespace stlverify;

namespace {

Polytope rows(const Eigen::MatrixXd& C, const Eigen::VectorXd& d) { return {C, d}; }

UnsafeList list_of(std::initializer_list<Polytope> polys) {
    UnsafeList L;
    for (const Polytope& P : polys) L.polys.push_back(P);
    return L;
}

} // namespace

TEST_CASE("empty safe list returns the zero vector") {
    const MilpResult r = find_counterexample(UnsafeList{}, 3);
    REQUIRE(r.status == MilpStatus::Feasible);
    CHECK(r.alpha.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("polytope covering the box is infeasible") {
    Eigen::MatrixXd C(1, 2);
    C << 1, 0;
    Eigen::VectorXd d(1);
    d << 2;  // alpha_1 <= 2 contains the box
    const MilpResult r = find_counterexample(list_of({rows(C, d)}), 2);
    CHECK(r.status == MilpStatus::Infeasible);
}

TEST_CASE("box faces are stripped from the encoding") {
    // K = box rows only: covers everything
    const Polytope box = Polytope::axis_box(Eigen::VectorXd::Constant(2, -1.0),
                                            Eigen::VectorXd::Constant(2, 1.0));
    const MilpResult r = find_counterexample(list_of({box}), 2);
    CHECK(r.status == MilpStatus::Infeasible);

    // half box plus box rows: the proper row alone decides
    Eigen::MatrixXd C(1, 2);
    C << 1, 0;
    Eigen::VectorXd d(1);
    d << 0;
    const Polytope half = poly_intersection(rows(C, d), box);
    const MilpResult r2 = find_counterexample(list_of({half}), 2);
    REQUIRE(r2.status == MilpStatus::Feasible);
    CHECK(r2.alpha(0) > 0.0);  // violates alpha_1 <= 0
}

TEST_CASE("two half spaces covering the box are infeasible") {
    Eigen::MatrixXd C1(1, 1), C2(1, 1);
    C1 << 1;
    C2 << -1;
    Eigen::VectorXd d(1);
    d << 0;
    const UnsafeList L = list_of({rows(C1, d), rows(C2, d)});
    const MilpResult r = find_counterexample(L, 1);
    CHECK(r.status == MilpStatus::Infeasible);

    CounterexampleMilp milp;
    milp.p = 1;
    milp.safe_sets = L.polys;
    milp.epsilon = 1e-6;
    CHECK(!oracles::enumerate_counterexample(milp).feasible);
}

TEST_CASE("single-row polytopes reduce to one LP") {
    Eigen::MatrixXd C(1, 2);
    C << 1, 1;
    Eigen::VectorXd d(1);
    d << 0.5;
    const MilpResult r = find_counterexample(list_of({rows(C, d)}), 2);
    REQUIRE(r.status == MilpStatus::Feasible);
    CHECK(r.nodes <= 3);
    CHECK(C.row(0).dot(r.alpha) > 0.5);
    // minimal 1-norm: spreads to the constraint boundary
    CHECK(r.objective == doctest::Approx(0.5 + 1e-6).epsilon(1e-4));
}

TEST_CASE("matches exhaustive enumeration on random instances") {
    std::mt19937_64 rng(41);
    int feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 3);
        const int q = 1 + static_cast<int>(rng() % 3);
        CounterexampleMilp milp;
        milp.p = p;
        milp.epsilon = 1e-6 + 1e-9;
        UnsafeList L;
        for (int j = 0; j < q; ++j) {
            const int s = 1 + static_cast<int>(rng() % 3);
            Eigen::MatrixXd C = oracles::random_matrix(rng, s, p, 1.0);
            Eigen::VectorXd d = oracles::random_vector(rng, s, 1.2);
            L.polys.push_back(rows(C, d));
            milp.safe_sets.push_back(rows(C, d));
        }

        MilpOptions opts;
        const MilpResult mine = find_counterexample(L, p, opts);
        const oracles::EnumResult ref = oracles::enumerate_counterexample(milp);

        REQUIRE((mine.status == MilpStatus::Feasible) == ref.feasible);
        if (ref.feasible) {
            ++feasible;
            CHECK(mine.objective == doctest::Approx(ref.objective).epsilon(1e-6));
            // direct substitution: every polytope has a strictly violated row
            CHECK(milp.validate(mine.alpha, mine.chosen_rows, 1e-8));
            const Eigen::VectorXd margins = milp.margins(mine.alpha, mine.chosen_rows);
            CHECK(margins.minCoeff() >= 1e-6 * (1.0 - 1e-9) - 1e-12);
        } else {
            ++infeasible;
        }
    }
    CHECK(feasible > 30);
    CHECK(infeasible > 5);
}

TEST_CASE("three polytopes with two rows each match enumeration") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        CounterexampleMilp milp;
        milp.p = 3;
        milp.epsilon = 1e-6;
        UnsafeList L;
        for (int j = 0; j < 3; ++j) {
            Eigen::MatrixXd C = oracles::random_matrix(rng, 2, 3, 1.0);
            Eigen::VectorXd d = oracles::random_vector(rng, 2, 1.0);
            L.polys.push_back(rows(C, d));
            milp.safe_sets.push_back(rows(C, d));
        }
        const MilpResult mine = milp_branch_and_bound(milp);
        const oracles::EnumResult ref = oracles::enumerate_counterexample(milp);
        REQUIRE((mine.status == MilpStatus::Feasible) == ref.feasible);
        if (ref.feasible) CHECK(mine.objective == doctest::Approx(ref.objective).epsilon(1e-6));
    }
}

TEST_CASE("node cap reports upward") {
    std::mt19937_64 rng(43);
    CounterexampleMilp milp;
    milp.p = 4;
    milp.epsilon = 1e-6;
    for (int j = 0; j < 6; ++j)
        milp.safe_sets.push_back(
            rows(oracles::random_matrix(rng, 4, 4, 1.0), -oracles::random_vector(rng, 4, 0.1).cwiseAbs()));
    MilpOptions opts;
    opts.node_cap = 2;
    const MilpResult r = milp_branch_and_bound(milp, opts);
    CHECK(r.status == MilpStatus::NodeCapExceeded);
}
