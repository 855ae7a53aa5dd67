#include "stlverify/problem.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace stlverify {

using nlohmann::json;

namespace {

// single-axis double integrator: position, velocity, acceleration input
ProblemFile double_integrator(const json& params) {
    const std::string variant = params.value("variant", "reach_safe");

    ProblemFile p;
    p.name = "double_integrator/" + variant;
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 0, 1, 0, 0;
    B << 0, 1;
    p.sys = LinearSystem(A, B);

    Eigen::VectorXd c0(2), r0(2);
    c0 << 0.0, 1.0;
    r0 << 0.05, 0.1;
    p.X0 = Zonotope::box(c0, r0);

    Eigen::VectorXd cu(1), ru(1);
    cu << 0.0;
    ru << 0.2;
    p.input = InputSpec::constant_set(Zonotope::box(cu, ru));

    if (variant == "reach_safe") {
        p.spec_text = "F[0,2] x1 > 0.8";
    } else if (variant == "reach_unsafe") {
        p.spec_text = "F[0,2] x1 > 2.4";
    } else if (variant == "avoid_safe") {
        p.spec_text = "G[0,2] x1 < 2.8";
    } else if (variant == "avoid_unsafe") {
        p.spec_text = "G[0,2] x1 < 2.4";
    } else if (variant == "until_safe") {
        p.spec_text = "x1 < 1.6 U[1,2] x1 > 1.2";
    } else if (variant == "until_unsafe") {
        p.spec_text = "x1 < 1.1 U[1,2] x1 > 1.2";
    } else if (variant == "window_safe") {
        p.spec_text = "F[0,1] G[0,0.5] (x2 > 0.6 & x2 < 1.4)";
    } else if (variant == "window_unsafe") {
        p.spec_text = "F[0,1] G[0,0.5] x2 > 1.05";
    } else if (variant == "next_safe") {
        p.spec_text = "N[1] x1 > 0.6 & N[2] x1 > 1.3";
    } else if (variant == "release_safe") {
        p.spec_text = "x2 < 0 R[0,2] x1 < 2.8";
    } else {
        throw Error("double_integrator: unknown variant " + variant);
    }
    return p;
}

// stable rotation through a corridor around the x1 axis; the whole reachable
// set never fits the corridor although every trajectory passes through it
ProblemFile rotation(const json& params) {
    const std::string variant = params.value("variant", "safe");

    ProblemFile p;
    p.name = "rotation/" + variant;
    Eigen::MatrixXd A(2, 2);
    A << 0, -1, 1, 0;
    p.sys = LinearSystem(A, Eigen::MatrixXd::Zero(2, 0));

    Eigen::VectorXd c0(2), r0(2);
    c0 << 0.53, 0.53;
    r0 << 0.3, 0.3;
    p.X0 = Zonotope::box(c0, r0);
    p.input = InputSpec::constant_set(Zonotope::point(Eigen::VectorXd::Zero(0)));

    double corridor = 0.4;
    if (variant == "unsafe") corridor = 0.12;
    else if (variant != "safe") throw Error("rotation: unknown variant " + variant);

    std::ostringstream spec;
    spec << "F[0,5.75] G[0,0.25] (x2 < " << corridor << " & x2 > -" << corridor << ")";
    p.spec_text = spec.str();
    return p;
}

// 1-D heat diffusion on a rod with Dirichlet boundaries; an uncertain initial
// temperature bump diffuses toward a probe node
ProblemFile heat1d(const json& params) {
    const int N = params.value("N", 25);
    const std::string variant = params.value("variant", "safe");
    if (N < 3) throw Error("heat1d: N must be at least 3");

    // diffusion scaling, bump/probe placement and threshold per rod size;
    // tuned so the probe value rises through the threshold during [3,4] for
    // cool starts and drops below it again before t = 6
    const double diffusivity = 0.02;
    const double h = 1.0 / (N + 1);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    const double k = diffusivity / (h * h);
    for (int i = 0; i < N; ++i) {
        A(i, i) = -2.0 * k;
        if (i > 0) A(i, i - 1) = k;
        if (i + 1 < N) A(i, i + 1) = k;
    }

    // initial bump over roughly the first fifth of the rod
    const int bump_lo = std::max(0, static_cast<int>(std::round(0.08 * N)));
    const int bump_hi = std::max(bump_lo + 1, static_cast<int>(std::round(0.28 * N)));
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd r0 = Eigen::VectorXd::Zero(N);
    for (int i = bump_lo; i <= bump_hi; ++i) {
        c0(i) = 1.0;
        r0(i) = 0.1;
    }
    const int probe = static_cast<int>(std::round(0.72 * (N + 1))) - 1;  // 1-based below
    const double threshold = params.value("threshold", 0.035);

    ProblemFile p;
    p.name = "heat1d" + std::to_string(N) + "/" + variant;
    p.sys = LinearSystem(A, Eigen::MatrixXd::Zero(N, 0));
    p.X0 = Zonotope::box(c0, r0);
    p.input = InputSpec::constant_set(Zonotope::point(Eigen::VectorXd::Zero(0)));

    std::ostringstream spec;
    const std::string var = "x" + std::to_string(probe + 1);
    if (variant == "safe") {
        spec << "G[3,4] " << var << " > " << threshold << " | F[4,6] " << var << " < "
             << threshold;
    } else if (variant == "unsafe") {
        spec << "G[3,4] " << var << " > " << threshold << " | F[4,5] " << var << " < "
             << threshold;
    } else {
        throw Error("heat1d: unknown variant " + variant);
    }
    p.spec_text = spec.str();
    return p;
}

// mobile robot tracking a slow reference sweep; LQR gain for the per-axis
// double integrator with Q = I and R = 0.1 (precomputed)
ProblemFile robot(const json& params) {
    const std::string variant = params.value("variant", "safe");
    if (variant != "safe") throw Error("robot: unknown variant " + variant);

    ClosedLoopSpec cl;
    cl.A = Eigen::MatrixXd::Zero(4, 4);
    cl.A(0, 2) = 1.0;
    cl.A(1, 3) = 1.0;
    cl.B = Eigen::MatrixXd::Zero(4, 2);
    cl.B(2, 0) = 1.0;
    cl.B(3, 1) = 1.0;

    const double k1 = 3.16227766016838;  // sqrt(10)
    const double k2 = 4.04037229723785;
    cl.K = Eigen::MatrixXd::Zero(2, 4);
    cl.K(0, 0) = -k1;
    cl.K(0, 2) = -k2;
    cl.K(1, 1) = -k1;
    cl.K(1, 3) = -k2;

    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd r0(4);
    r0 << 0.1, 0.1, 0.0, 0.0;
    cl.X0_plant = Zonotope::box(c0, r0);
    cl.xref0 = Eigen::VectorXd::Zero(4);

    // reference: accelerate along x during the first piece, then drift at
    // constant speed
    cl.uref_dt = 1.25;
    const double v = 0.08;
    for (int piece = 0; piece < 8; ++piece) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
        if (piece == 0) u(0) = v / 1.25;
        cl.uref.push_back(u);
    }
    cl.w_radius = Eigen::VectorXd::Constant(2, 0.1);

    // S1: small box the sweep passes through; S2: wide box downstream,
    // reached six seconds after S1; S3: region off the track
    std::ostringstream spec;
    spec << "F[0,3.4] ((x1 > 0.1175 & x1 < 0.2075 & x2 > -0.12 & x2 < 0.12)"
         << " & N[6] (x1 > 0.3 & x1 < 0.85 & x2 > -0.2 & x2 < 0.2))"
         << " & G[0,10] (x1 < 0.2 | x1 > 0.4 | x2 < 0.3 | x2 > 0.6)";

    return assemble_closed_loop(cl, "robot/safe", spec.str());
}

// no-passing traffic scenario: double integrator in the plane, large input
// uncertainty, traffic rules over the horizon [0,1]
ProblemFile traffic(const json& params) {
    const std::string variant = params.value("variant", "rules");

    ProblemFile p;
    p.name = "traffic/" + variant;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(0, 2) = 1.0;
    A(1, 3) = 1.0;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 2);
    B(2, 0) = 1.0;
    B(3, 1) = 1.0;
    p.sys = LinearSystem(A, B);

    Eigen::VectorXd c0(4), r0(4);
    c0 << 0.0, 0.0, 30.0, 0.0;
    r0 << 0.1, 0.1, 0.1, 0.1;
    p.X0 = Zonotope::box(c0, r0);

    Eigen::VectorXd cu = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd ru = Eigen::VectorXd::Constant(2, 9.0);
    p.input = InputSpec::constant_set(Zonotope::box(cu, ru));

    if (variant == "rules") {
        p.spec_text = "G[0,1] (x1 < 22 | x2 < 2) & G[0,1] x2 > -2 & G[0,1] x2 < 6";
    } else if (variant == "loose") {
        p.spec_text = "G[0,1] x2 > -40 & G[0,1] x2 < 40";
    } else {
        throw Error("traffic: unknown variant " + variant);
    }
    return p;
}

} // namespace

ProblemFile generate_benchmark(const std::string& name, const json& params) {
    if (name == "double_integrator") return double_integrator(params);
    if (name == "rotation") return rotation(params);
    if (name == "heat1d") return heat1d(params);
    if (name == "robot") return robot(params);
    if (name == "traffic") return traffic(params);
    throw Error("unknown benchmark: " + name);
}

std::vector<std::string> benchmark_names() {
    return {"double_integrator", "rotation", "heat1d", "robot", "traffic"};
}

} // namespace stlverify
