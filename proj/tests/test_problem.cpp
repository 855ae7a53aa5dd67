#include <doctest.h>

#include <nlohmann/json.hpp>

#include "stlverify/problem.hpp"
#include "support/oracles.hpp"

using namespace stlverify;
using nlohmann::json;

TEST_CASE("minimal problem file loads") {
    const json j = json::parse(R"({
        "A": [[0.0]],
        "X0": {"c": [1.0], "G": [[0.1]]},
        "spec": "G[0,1] x1 < 2"
    })");
    const ProblemFile p = problem_from_json(j);
    CHECK(p.sys.n() == 1);
    CHECK(p.sys.m() == 0);
    CHECK(p.X0.num_generators() == 1);
    CHECK(p.parse_spec()->kind == StlKind::Globally);
}

TEST_CASE("dimension errors name the field") {
    json j = json::parse(R"({
        "A": [[0.0, 1.0], [0.0, 0.0]],
        "B": [[0.0]],
        "X0": {"c": [0.0, 0.0]},
        "U": {"c": [0.0]},
        "spec": "true"
    })");
    CHECK_THROWS_WITH_AS(problem_from_json(j), doctest::Contains("B:"), Error);

    j["B"] = json::parse("[[0.0],[1.0]]");
    j["X0"]["c"] = json::parse("[0.0]");
    CHECK_THROWS_WITH_AS(problem_from_json(j), doctest::Contains("X0"), Error);

    j["X0"]["c"] = json::parse("[0.0, 0.0]");
    j["spec"] = "x3 < 1";
    CHECK_THROWS_WITH_AS(problem_from_json(j), doctest::Contains("spec"), Error);
}

TEST_CASE("round trip is bit-identical for canonical files") {
    for (const std::string& name : benchmark_names()) {
        const ProblemFile p = generate_benchmark(name, json::object());
        const json j1 = problem_to_json(p);
        const ProblemFile q = problem_from_json(j1);
        const json j2 = problem_to_json(q);
        CHECK(j1.dump(2) == j2.dump(2));
    }
}

TEST_CASE("benchmark generators produce valid problems") {
    for (const std::string& name : benchmark_names()) {
        const ProblemFile p = generate_benchmark(name, json::object());
        CHECK(p.sys.n() > 0);
        CHECK(p.X0.dim() == p.sys.n());
        CHECK(max_state_index(*p.parse_spec()) <= p.sys.n());
    }
}

TEST_CASE("traffic scenario carries the published set values") {
    const ProblemFile p = generate_benchmark("traffic", json::object());
    REQUIRE(p.sys.n() == 4);
    const Interval x0 = zono_interval_enclosure(p.X0);
    CHECK(x0.lo(2) == doctest::Approx(29.9));
    CHECK(x0.hi(2) == doctest::Approx(30.1));
    CHECK(x0.lo(0) == doctest::Approx(-0.1));
    const Interval u = zono_interval_enclosure(p.input.constant);
    CHECK(u.lo(0) == doctest::Approx(-9));
    CHECK(u.hi(1) == doctest::Approx(9));
}

TEST_CASE("heat benchmark structure") {
    const ProblemFile p = generate_benchmark("heat1d", json::parse(R"({"N": 5})"));
    REQUIRE(p.sys.n() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(p.sys.A.row(i).sum() <= 1e-12);  // diffusion loses heat at the boundary
        for (int j = 0; j < 5; ++j) {
            if (std::abs(i - j) > 1) CHECK(p.sys.A(i, j) == 0.0);
        }
        CHECK(p.sys.A(i, i) < 0.0);
    }
}

TEST_CASE("double integrator follows parabolic trajectories") {
    const ProblemFile p = generate_benchmark("double_integrator", json::object());
    const Zonotope X0p = Zonotope::point(p.X0.c);
    Eigen::VectorXd u(1);
    u << 0.15;
    const std::vector<Zonotope> steps(8, Zonotope::point(u));
    const SampledTrace tr =
        oracles::simulate_factors(p.sys, X0p, steps, 0.25, Eigen::VectorXd::Zero(0));
    for (int i = 0; i <= 8; ++i) {
        const double t = 0.25 * i;
        const double expect = p.X0.c(0) + p.X0.c(1) * t + 0.5 * u(0) * t * t;
        CHECK(tr.states[i](0) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("closed-loop assembly matches a direct simulation") {
    const ProblemFile p = generate_benchmark("robot", json::object());
    REQUIRE(p.sys.n() == 8);
    REQUIRE(p.sys.m() == 4);
    REQUIRE(p.input.time_varying());

    // simulate the assembled system for a point initial state and constant
    // disturbance, then re-derive plant and reference separately using the
    // feedback law
    Eigen::MatrixXd A(4, 4), B(4, 2), K(2, 4);
    A.setZero();
    A(0, 2) = 1;
    A(1, 3) = 1;
    B.setZero();
    B(2, 0) = 1;
    B(3, 1) = 1;
    K.setZero();
    const double k1 = 3.16227766016838, k2 = 4.04037229723785;
    K(0, 0) = -k1;
    K(0, 2) = -k2;
    K(1, 1) = -k1;
    K(1, 3) = -k2;

    Eigen::VectorXd xbar(8);
    xbar << 0.07, -0.04, 0, 0, 0, 0, 0, 0;
    Eigen::VectorXd x = xbar.head(4), xref = xbar.tail(4);
    Eigen::VectorXd w(2);
    w << 0.05, -0.02;

    const double h = 1e-4;
    double t = 0.0;
    for (int step = 0; step < 20000; ++step) {  // two seconds
        const int piece = std::min<int>(static_cast<int>(t / p.input.step_dt),
                                        static_cast<int>(p.input.steps.size()) - 1);
        const Eigen::VectorXd uref = p.input.steps[piece].c.head(2);

        // assembled dynamics
        Eigen::VectorXd ubar(4);
        ubar << uref, w;
        xbar += h * (p.sys.A * xbar + p.sys.B * ubar);

        // component dynamics with the explicit control law
        const Eigen::VectorXd uctr = uref + K * (x - xref) + w;
        x += h * (A * x + B * uctr);
        xref += h * (A * xref + B * uref);
        t += h;
    }
    CHECK((xbar.head(4) - x).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((xbar.tail(4) - xref).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("save and load through a file") {
    const ProblemFile p = generate_benchmark("rotation", json::object());
    const std::string path = "/tmp/stlverify_test_problem.json";
    save_problem(p, path);
    const ProblemFile q = load_problem(path);
    CHECK(problem_to_json(p).dump() == problem_to_json(q).dump());
    CHECK_THROWS_AS(load_problem("/tmp/this_file_does_not_exist.json"), Error);
}
