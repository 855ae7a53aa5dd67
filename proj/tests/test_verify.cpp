#include <doctest.h>

#include "stlverify/problem.hpp"
#include "stlverify/verify.hpp"
#include "support/oracles.hpp"

#include <nlohmann/json.hpp>

using namespace stlverify;

namespace {

LinearSystem double_integrator() {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 0, 1, 0, 0;
    B << 0, 1;
    return {A, B};
}

Zonotope box2(double cx, double cv, double rx, double rv) {
    Eigen::VectorXd c(2), r(2);
    c << cx, cv;
    r << rx, rv;
    return Zonotope::box(c, r);
}

Zonotope box1(double c0, double r0) {
    Eigen::VectorXd c(1), r(1);
    c << c0;
    r << r0;
    return Zonotope::box(c, r);
}

} // namespace

TEST_CASE("truncation order tuning") {
    SUBCASE("zero dynamics returns the minimum order") {
        CHECK(tune_truncation_order(Eigen::MatrixXd::Zero(3, 3), 0.5) == 2);
    }

    SUBCASE("scalar system matches a direct iteration of the criterion") {
        Eigen::MatrixXd A(1, 1);
        A << 1;
        const double dt = 0.1;
        const int kappa = tune_truncation_order(A, dt);
        int expect = -1;
        for (int k = 2; k <= 100; ++k) {
            const double nk = imat_frobenius_norm(taylor_interval_sum(A, dt, k));
            const double nk1 = imat_frobenius_norm(taylor_interval_sum(A, dt, k + 1));
            if (nk1 == 0.0 || 1.0 - nk / nk1 <= 1e-10) {
                expect = k;
                break;
            }
        }
        CHECK(kappa == expect);
        CHECK(kappa >= 2);
    }

    SUBCASE("non-increasing as dt shrinks") {
        std::mt19937_64 rng(51);
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd A = oracles::random_stable_matrix(rng, 3);
            int prev = 1000;
            for (double dt : {0.8, 0.4, 0.2, 0.1}) {
                const int kappa = tune_truncation_order(A, dt);
                CHECK(kappa <= prev);
                prev = kappa;
            }
        }
    }

    SUBCASE("cap is reported") {
        Eigen::MatrixXd A(1, 1);
        A << 40.0;
        CHECK_THROWS_AS(tune_truncation_order(A, 2.0, 8), CapError);
    }
}

TEST_CASE("counterexample trajectory construction") {
    const LinearSystem sys = double_integrator();
    const Zonotope X0 = box2(0, 1, 0.05, 0.1);
    const Zonotope U = box1(0.1, 0.2);
    const double dt = 0.25, t_end = 1.0;
    const std::vector<Zonotope> U_steps(4, U);

    SUBCASE("zero factors follow the centers") {
        const Eigen::VectorXd alpha = Eigen::VectorXd::Zero(2 + 4);
        const SampledTrace tr = counterexample_trajectory(sys, X0, U_steps, alpha, dt, t_end);
        REQUIRE(tr.times.size() == 5);
        CHECK((tr.states[0] - X0.c).cwiseAbs().maxCoeff() == 0.0);
        for (const Eigen::VectorXd& u : tr.inputs)
            CHECK(u(0) == doctest::Approx(0.1));
    }

    SUBCASE("integrator-free system matches the closed form") {
        Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(2, 2);
        Eigen::MatrixXd B(2, 1);
        B << 1, 0.5;
        const LinearSystem sys0(A0, B);
        std::mt19937_64 rng(52);
        const Eigen::VectorXd alpha = oracles::sample_factors(rng, 2 + 4);
        const SampledTrace tr = counterexample_trajectory(sys0, X0, U_steps, alpha, dt, t_end);
        Eigen::VectorXd expect = X0.c + X0.G * alpha.head(2);
        for (int i = 0; i < 4; ++i) {
            expect += dt * (B * (U.c + U.G * alpha.segment(2 + i, 1)));
            CHECK((tr.states[i + 1] - expect).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SUBCASE("trajectory stays inside the reach sequence") {
        ReachParams params{dt, t_end, 6};
        const ReachSequence seq = reach_sequence(sys, X0, U, params);
        std::mt19937_64 rng(53);
        for (int mc = 0; mc < 30; ++mc) {
            const Eigen::VectorXd alpha = oracles::sample_factors(rng, seq.factor_dim());
            const SampledTrace tr = counterexample_trajectory(sys, X0, U_steps, alpha, dt, t_end);
            for (int i = 0; i <= 4; ++i)
                CHECK(zono_contains_point(seq.Rt[i], tr.states[i], 1e-9));
        }
    }
}

TEST_CASE("verify trivial specifications") {
    const LinearSystem sys = double_integrator();
    const Zonotope X0 = box2(0, 1, 0.05, 0.1);
    const InputSpec U = InputSpec::constant_set(box1(0, 0.2));

    SUBCASE("true is safe on the first iteration") {
        const Verdict v = verify(sys, X0, U, StlFormula::make_true());
        CHECK(v.result == VerdictResult::Safe);
        CHECK(v.iterations == 1);
    }

    SUBCASE("unreachable atom is unsafe with a validated counterexample") {
        const Verdict v = verify(sys, X0, U, parse_stl("x1 > 100"));
        REQUIRE(v.result == VerdictResult::Unsafe);
        REQUIRE(v.counterexample.has_value());
        CHECK(!monitor_trace(parse_stl("x1 > 100"), *v.counterexample));
        // the counterexample starts inside the initial set
        CHECK(zono_contains_point(X0, v.counterexample->states.front(), 1e-9));
    }
}

TEST_CASE("verify on double-integrator reach and avoid") {
    std::mt19937_64 rng(54);
    const LinearSystem sys = double_integrator();
    const Zonotope X0 = box2(0, 1, 0.05, 0.1);
    const InputSpec U = InputSpec::constant_set(box1(0, 0.2));

    SUBCASE("reachable goal verifies safe and MC agrees") {
        const StlPtr phi = parse_stl("F[0,2] x1 > 0.8");
        const Verdict v = verify(sys, X0, U, phi);
        REQUIRE(v.result == VerdictResult::Safe);

        const double sim_dt = 0.125;
        const std::vector<Zonotope> steps(16, U.constant);
        for (int mc = 0; mc < 300; ++mc) {
            const Eigen::VectorXd alpha = oracles::sample_factors(rng, 2 + 16);
            CHECK(monitor_trace(phi, oracles::simulate_factors(sys, X0, steps, sim_dt, alpha)));
        }
    }

    SUBCASE("violated bound falsifies with a valid trajectory") {
        const StlPtr phi = parse_stl("G[0,2] x1 < 2.4");
        const Verdict v = verify(sys, X0, U, phi);
        REQUIRE(v.result == VerdictResult::Unsafe);
        REQUIRE(v.counterexample.has_value());
        CHECK(!monitor_trace(phi, *v.counterexample));
    }

    SUBCASE("unknown after exhausting iterations on a knife-edge instance") {
        VerifierConfig cfg;
        cfg.max_iterations = 2;
        // boundary exactly on the reachable maximum: undecidable-ish quickly
        const Verdict v = verify(sys, X0, U, parse_stl("G[0,2] x1 < 0.0"), cfg);
        CHECK(v.result != VerdictResult::Safe);
    }
}

TEST_CASE("input resampling") {
    std::vector<Zonotope> pieces;
    for (int i = 0; i < 4; ++i) pieces.push_back(box1(static_cast<double>(i), 0.1));
    const InputSpec U = InputSpec::piecewise(pieces, 1.0);

    SUBCASE("aligned grid maps exactly") {
        bool exact = false;
        const std::vector<Zonotope> steps = U.resample(0.5, 8, &exact);
        CHECK(exact);
        REQUIRE(steps.size() == 8);
        CHECK(steps[0].c(0) == doctest::Approx(0));
        CHECK(steps[1].c(0) == doctest::Approx(0));
        CHECK(steps[2].c(0) == doctest::Approx(1));
        CHECK(steps[7].c(0) == doctest::Approx(3));
    }

    SUBCASE("unaligned grid uses enclosures and reports inexact") {
        bool exact = true;
        const std::vector<Zonotope> steps = U.resample(1.6, 2, &exact);
        CHECK(!exact);
        // first reach step spans pieces 0 and 1
        const Interval hull = zono_interval_enclosure(steps[0]);
        CHECK(hull.lo(0) <= -0.1 + 1e-12);
        CHECK(hull.hi(0) >= 1.1 - 1e-12);
    }
}

TEST_CASE("prediction mode") {
    const LinearSystem sys = double_integrator();
    const Zonotope X0 = box2(0, 1, 0.05, 0.1);
    const InputSpec U = InputSpec::constant_set(box1(0, 0.2));

    SUBCASE("true specification keeps every factor") {
        const Prediction pred = predict_safe_behaviors(sys, X0, U, StlFormula::make_true(), 0.5, 4);
        REQUIRE(pred.legal_factors.size() == 1);
        std::mt19937_64 rng(55);
        for (int i = 0; i < 100; ++i)
            CHECK(pred.legal_factors.polys[0].contains(
                oracles::sample_factors(rng, pred.reach.factor_dim()), 1e-9));
    }

    SUBCASE("false specification keeps nothing") {
        const Prediction pred =
            predict_safe_behaviors(sys, X0, U, StlFormula::make_false(), 0.5, 4);
        CHECK(pred.legal_factors.empty());
    }
}
