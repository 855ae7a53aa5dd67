#include "stlverify/problem.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace stlverify {

using nlohmann::json;

namespace {

json vec_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json mat_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

json set_entry(const Zonotope& Z, double t, const char* kind, int px, int py) {
    json e;
    e["t"] = t;
    e["kind"] = kind;
    const Interval hull = zono_interval_enclosure(Z);
    e["lo"] = vec_json(hull.lo);
    e["hi"] = vec_json(hull.hi);
    if (Z.dim() >= 2) {
        json poly = json::array();
        for (const Eigen::Vector2d& v : zono_shadow_polygon(Z, px, py)) {
            poly.push_back(json::array({v.x(), v.y()}));
        }
        e["shadow"] = std::move(poly);
    }
    return e;
}

} // namespace

json verdict_to_json(const Verdict& v, double wall_time_ms) {
    json out;
    out["result"] = to_string(v.result);
    out["iterations"] = v.iterations;
    out["dt_final"] = v.dt_final;
    out["kappa"] = v.kappa_final;
    out["wall_time_ms"] = wall_time_ms;
    json iters = json::array();
    for (const IterationDiag& d : v.diags) {
        json e;
        e["dt"] = d.dt;
        e["kappa"] = d.kappa;
        e["unsafe_polytopes"] = d.unsafe_polytopes;
        e["safe_polytopes"] = d.safe_polytopes;
        if (d.wholeset_entailed.has_value()) e["wholeset_entailed"] = *d.wholeset_entailed;
        if (!d.note.empty()) e["note"] = d.note;
        iters.push_back(std::move(e));
    }
    out["iterations_detail"] = std::move(iters);
    return out;
}

json reach_to_json(const ReachSequence& seq, int proj_x, int proj_y) {
    json out;
    out["dt"] = seq.dt;
    out["t_end"] = seq.t_end;
    out["projection"] = json::array({proj_x + 1, proj_y + 1});
    json sets = json::array();
    for (int i = 0; i <= seq.num_steps(); ++i) {
        sets.push_back(set_entry(seq.Rt[i], i * seq.dt, "point", proj_x, proj_y));
        if (i < seq.num_steps())
            sets.push_back(set_entry(seq.Rtau[i], (i + 0.5) * seq.dt, "interval", proj_x, proj_y));
    }
    out["sets"] = std::move(sets);
    return out;
}

json occupancy_to_json(const Prediction& pred) {
    const ReachSequence& seq = pred.reach;
    json out;
    out["dt"] = seq.dt;
    out["t_end"] = seq.t_end;
    out["factor_dim"] = seq.factor_dim();

    json polys = json::array();
    for (const Polytope& K : pred.legal_factors.polys) {
        json e;
        e["C"] = mat_json(K.C);
        e["d"] = vec_json(K.d);
        polys.push_back(std::move(e));
    }
    out["legal_factors"] = std::move(polys);

    json steps = json::array();
    for (int i = 0; i < seq.num_steps(); ++i) {
        json e;
        e["t_lo"] = i * seq.dt;
        e["t_hi"] = (i + 1) * seq.dt;
        e["c"] = vec_json(seq.Rtau[i].c);
        e["G"] = mat_json(seq.Rtau[i].G);
        json dep = json::array();
        for (int idx : seq.tuples.N[i]) dep.push_back(idx);
        e["dependency_columns"] = std::move(dep);
        steps.push_back(std::move(e));
    }
    out["intervals"] = std::move(steps);
    return out;
}

void write_counterexample_csv(const SampledTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write counterexample file: " + path);
    const int n = trace.dim();
    const int m = trace.inputs.empty() ? 0 : static_cast<int>(trace.inputs.front().size());
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    for (int i = 1; i <= m; ++i) out << ",u" << i;
    out << "\n";
    out.precision(17);
    for (size_t k = 0; k < trace.times.size(); ++k) {
        out << trace.times[k];
        for (int i = 0; i < n; ++i) out << "," << trace.states[k](i);
        if (m > 0) {
            const size_t input_idx = std::min(k, trace.inputs.size() - 1);
            for (int i = 0; i < m; ++i) out << "," << trace.inputs[input_idx](i);
        }
        out << "\n";
    }
}

} // namespace stlverify
