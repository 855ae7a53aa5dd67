#include "stlverify/problem.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace stlverify {

using nlohmann::json;

namespace {

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field, int expect_cols = -1) {
    if (!j.is_array()) throw Error(field + ": expected an array of rows");
    const int rows = static_cast<int>(j.size());
    int cols = expect_cols;
    if (rows == 0) {
        return Eigen::MatrixXd::Zero(0, std::max(cols, 0));
    }
    if (!j[0].is_array()) throw Error(field + ": rows must be arrays");
    if (cols < 0) cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw Error(field + ": row " + std::to_string(i) + " has " +
                        std::to_string(j[i].size()) + " entries, expected " + std::to_string(cols));
        for (int k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
    }
    return M;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw Error(field + ": expected an array");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Zonotope zonotope_from_json(const json& j, const std::string& field, int expect_dim = -1) {
    if (!j.contains("c")) throw Error(field + ": missing center \"c\"");
    Eigen::VectorXd c = vector_from_json(j["c"], field + ".c");
    if (expect_dim >= 0 && c.size() != expect_dim)
        throw Error(field + ".c: expected dimension " + std::to_string(expect_dim) + ", got " +
                    std::to_string(c.size()));
    Eigen::MatrixXd G(c.size(), 0);
    if (j.contains("G") && !j["G"].empty()) {
        G = matrix_from_json(j["G"], field + ".G");
        if (G.rows() != c.size())
            throw Error(field + ".G: expected " + std::to_string(c.size()) + " rows, got " +
                        std::to_string(G.rows()));
    }
    return {std::move(c), std::move(G)};
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json zonotope_to_json(const Zonotope& Z) {
    json out;
    out["c"] = vector_to_json(Z.c);
    out["G"] = matrix_to_json(Z.G);
    return out;
}

} // namespace

ProblemFile assemble_closed_loop(const ClosedLoopSpec& spec, const std::string& name,
                                 const std::string& spec_text) {
    const int n = static_cast<int>(spec.A.rows());
    const int m = static_cast<int>(spec.B.cols());
    if (spec.A.cols() != n) throw Error("closed_loop.A: must be square");
    if (spec.B.rows() != n) throw Error("closed_loop.B: row count must match A");
    if (spec.K.rows() != m || spec.K.cols() != n)
        throw Error("closed_loop.K: expected shape m x n");
    if (spec.X0_plant.dim() != n) throw Error("closed_loop.x0: dimension mismatch with A");
    if (spec.xref0.size() != n) throw Error("closed_loop.xref0: dimension mismatch with A");
    if (spec.w_radius.size() != m) throw Error("closed_loop.w_radius: expected one entry per input");
    if (spec.uref.empty()) throw Error("closed_loop.u_ref: empty sequence");
    if (!(spec.uref_dt > 0)) throw Error("closed_loop.u_ref: grid must be positive");

    // stacked state [x; x_ref], stacked input [u_ref; w]
    Eigen::MatrixXd Abar = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Abar.topLeftCorner(n, n) = spec.A + spec.B * spec.K;
    Abar.topRightCorner(n, n) = -spec.B * spec.K;
    Abar.bottomRightCorner(n, n) = spec.A;

    Eigen::MatrixXd Bbar = Eigen::MatrixXd::Zero(2 * n, 2 * m);
    Bbar.topLeftCorner(n, m) = spec.B;
    Bbar.topRightCorner(n, m) = spec.B;
    Bbar.bottomLeftCorner(n, m) = spec.B;

    Eigen::VectorXd c0(2 * n);
    c0 << spec.X0_plant.c, spec.xref0;
    Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(2 * n, spec.X0_plant.num_generators());
    G0.topRows(n) = spec.X0_plant.G;

    std::vector<Zonotope> U_steps;
    U_steps.reserve(spec.uref.size());
    for (const Eigen::VectorXd& u : spec.uref) {
        if (u.size() != m) throw Error("closed_loop.u_ref: entry dimension mismatch");
        Eigen::VectorXd cu(2 * m);
        cu << u, Eigen::VectorXd::Zero(m);
        Eigen::VectorXd ru(2 * m);
        ru << Eigen::VectorXd::Zero(m), spec.w_radius;
        U_steps.push_back(Zonotope::box(cu, ru));
    }

    ProblemFile p;
    p.name = name;
    p.sys = LinearSystem(Abar, Bbar);
    p.X0 = Zonotope(c0, G0);
    p.input = InputSpec::piecewise(std::move(U_steps), spec.uref_dt);
    p.spec_text = spec_text;
    p.parse_spec();
    return p;
}

ProblemFile problem_from_json(const json& j) {
    ProblemFile p;
    p.name = j.value("name", "");
    if (!j.contains("spec")) throw Error("spec: missing specification text");
    p.spec_text = j["spec"].get<std::string>();

    if (j.contains("closed_loop")) {
        const json& cl = j["closed_loop"];
        ClosedLoopSpec spec;
        spec.A = matrix_from_json(cl.at("A"), "closed_loop.A");
        spec.B = matrix_from_json(cl.at("B"), "closed_loop.B");
        spec.K = matrix_from_json(cl.at("K"), "closed_loop.K");
        spec.X0_plant = zonotope_from_json(cl.at("x0"), "closed_loop.x0");
        spec.xref0 = vector_from_json(cl.at("xref0"), "closed_loop.xref0");
        spec.uref_dt = cl.at("u_ref").at("dt").get<double>();
        for (const json& u : cl.at("u_ref").at("values"))
            spec.uref.push_back(vector_from_json(u, "closed_loop.u_ref.values"));
        spec.w_radius = vector_from_json(cl.at("w_radius"), "closed_loop.w_radius");
        ProblemFile assembled = assemble_closed_loop(spec, p.name, p.spec_text);
        return assembled;
    }

    if (!j.contains("A")) throw Error("A: missing system matrix");
    Eigen::MatrixXd A = matrix_from_json(j["A"], "A");
    if (A.rows() != A.cols()) throw Error("A: must be square");
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd B(n, 0);
    if (j.contains("B") && !j["B"].empty()) {
        B = matrix_from_json(j["B"], "B");
        if (B.rows() != n)
            throw Error("B: expected " + std::to_string(n) + " rows to match A, got " +
                        std::to_string(B.rows()));
    }
    p.sys = LinearSystem(std::move(A), std::move(B));

    if (!j.contains("X0")) throw Error("X0: missing initial set");
    p.X0 = zonotope_from_json(j["X0"], "X0", n);

    const int m = p.sys.m();
    if (j.contains("U_steps")) {
        const json& us = j["U_steps"];
        std::vector<Zonotope> sets;
        for (size_t i = 0; i < us.at("sets").size(); ++i)
            sets.push_back(zonotope_from_json(us["sets"][i],
                                              "U_steps.sets[" + std::to_string(i) + "]", m));
        p.input = InputSpec::piecewise(std::move(sets), us.at("dt").get<double>());
    } else if (j.contains("U")) {
        p.input = InputSpec::constant_set(zonotope_from_json(j["U"], "U", m));
    } else {
        p.input = InputSpec::constant_set(Zonotope::point(Eigen::VectorXd::Zero(m)));
    }

    // validates the grammar and rejects unbounded operators
    const StlPtr spec = p.parse_spec();
    if (max_state_index(*spec) > n)
        throw Error("spec: references state x" + std::to_string(max_state_index(*spec)) +
                    " but the system has " + std::to_string(n) + " states");
    return p;
}

json problem_to_json(const ProblemFile& p) {
    json j;
    j["name"] = p.name;
    j["A"] = matrix_to_json(p.sys.A);
    j["B"] = matrix_to_json(p.sys.B);
    j["X0"] = zonotope_to_json(p.X0);
    if (p.input.time_varying()) {
        json us;
        us["dt"] = p.input.step_dt;
        us["sets"] = json::array();
        for (const Zonotope& U : p.input.steps) us["sets"].push_back(zonotope_to_json(U));
        j["U_steps"] = std::move(us);
    } else {
        j["U"] = zonotope_to_json(p.input.constant);
    }
    j["spec"] = p.spec_text;
    return j;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("problem file " + path + ": " + e.what());
    }
    try {
        return problem_from_json(j);
    } catch (const json::exception& e) {
        throw Error("problem file " + path + ": " + e.what());
    }
}

void save_problem(const ProblemFile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write problem file: " + path);
    out << problem_to_json(p).dump(2) << "\n";
}

} // namespace stlverify
