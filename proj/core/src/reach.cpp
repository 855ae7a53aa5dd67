#include "stlverify/reach.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace stlverify {

LinearSystem::LinearSystem(Eigen::MatrixXd A_, Eigen::MatrixXd B_)
    : A(std::move(A_)), B(std::move(B_)) {
    if (A.rows() != A.cols()) throw DimensionError("LinearSystem: A must be square");
    if (B.size() > 0 && B.rows() != A.rows())
        throw DimensionError("LinearSystem: B must have n rows");
    if (B.size() == 0) B.resize(A.rows(), 0);
}

int ReachParams::num_steps() const {
    return static_cast<int>(std::llround(t_end / dt));
}

void ReachParams::validate() const {
    if (!(dt > 0)) throw Error("ReachParams: dt must be positive");
    if (t_end < 0) throw Error("ReachParams: t_end must be nonnegative");
    if (kappa < 2) throw Error("ReachParams: kappa must be at least 2");
    const double steps = t_end / dt;
    if (std::abs(steps - std::llround(steps)) > 1e-6)
        throw Error("ReachParams: t_end must be an integer multiple of dt");
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A, double dt) {
    Eigen::MatrixXd Adt = A * dt;
    Eigen::MatrixXd E = Adt.exp();
    if (!E.allFinite()) throw OverflowError("matrix exponential overflowed");
    return E;
}

IntervalMatrix exp_remainder(const Eigen::MatrixXd& A, double dt, int kappa) {
    if (kappa < 2) throw Error("exp_remainder: kappa must be at least 2");
    const Eigen::Index n = A.rows();
    const Eigen::MatrixXd M = A.cwiseAbs() * dt;

    Eigen::MatrixXd expM = M.exp();
    if (!expM.allFinite())
        throw OverflowError("exp_remainder: e^{|A| dt} overflows; refine the time step");

    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int j = 1; j <= kappa; ++j) {
        term = (term * M) / static_cast<double>(j);
        if (!term.allFinite())
            throw OverflowError("exp_remainder: Taylor term overflows; refine the time step");
        sum += term;
    }
    Eigen::MatrixXd E = (expM - sum).cwiseMax(0.0);  // clamp roundoff below zero
    return IntervalMatrix::symmetric(E);
}

Eigen::MatrixXd propagation_matrix(const Eigen::MatrixXd& A, double dt) {
    const Eigen::Index n = A.rows();
    if (A.rows() != A.cols()) throw DimensionError("propagation_matrix: A must be square");

    // scale so the series converges quickly, then double back up with
    // T(2h) = (I + e^{A h}) T(h)
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff() * dt;
    int squarings = 0;
    double h = dt;
    while (norm / std::pow(2.0, squarings) > 0.5 && squarings < 60) ++squarings;
    h = dt / std::pow(2.0, squarings);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd term = h * Eigen::MatrixXd::Identity(n, n);  // A^j h^{j+1}/(j+1)! at j=0
    for (int j = 0; j < 200; ++j) {
        T += term;
        const double tn = term.cwiseAbs().maxCoeff();
        if (tn < 1e-300 || tn < 1e-18 * T.cwiseAbs().maxCoeff()) break;
        term = (term * A) * (h / static_cast<double>(j + 2));
    }
    if (squarings > 0) {
        Eigen::MatrixXd Eh = matrix_exponential(A, h);
        for (int k = 0; k < squarings; ++k) {
            T = T + Eh * T;
            Eh = Eh * Eh;
        }
    }
    if (!T.allFinite()) throw OverflowError("propagation_matrix overflowed");
    return T;
}

IntervalMatrix taylor_interval_sum(const Eigen::MatrixXd& A, double dt, int order) {
    const Eigen::Index n = A.rows();
    IntervalMatrix acc = IntervalMatrix::zero(n, n);
    Eigen::MatrixXd P = A / 2.0;  // A^{j-1}/j! at j = 2
    for (int j = 2; j <= order; ++j) {
        const double ex = -1.0 / (j - 1.0);
        const double coeff = (std::pow(j, j * ex) - std::pow(j, ex)) * std::pow(dt, j);
        acc = acc + IntervalMatrix::scalar_interval_times(coeff, 0.0, P);
        if (!acc.lo.allFinite() || !acc.hi.allFinite())
            throw OverflowError("taylor_interval_sum overflowed; refine the time step");
        P = (P * A) / static_cast<double>(j + 1);
    }
    return acc;
}

CurvatureMatrices curvature_matrices(const Eigen::MatrixXd& A, double dt, int kappa) {
    if (kappa < 2) throw Error("curvature_matrices: kappa must be at least 2");
    CurvatureMatrices out;
    out.T_kappa = taylor_interval_sum(A, dt, kappa);
    out.T_kappa1 = taylor_interval_sum(A, dt, kappa + 1);
    const IntervalMatrix E = exp_remainder(A, dt, kappa);
    out.F = out.T_kappa * A + E;
    out.G = out.T_kappa1 + E.scaled(dt);
    return out;
}

Zonotope input_difference_bloat(const Eigen::MatrixXd& A, double dt, int kappa,
                                const Zonotope& U0) {
    if (A.cols() != U0.dim()) throw DimensionError("input_difference_bloat: dimension mismatch");
    const Eigen::Index n = A.rows();

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    Zonotope acc = Zonotope::point(Eigen::VectorXd::Zero(n));
    Eigen::MatrixXd term = A * (dt * dt / 2.0);  // A^j dt^{j+1}/(j+1)! at j = 1
    for (int j = 1; j <= kappa; ++j) {
        sum += term;
        acc = zono_minkowski_sum(acc, zono_linear_map(term, U0));
        term = (term * A) * (dt / static_cast<double>(j + 2));
    }
    acc = zono_minkowski_sum(acc, zono_linear_map(sum, U0));

    const IntervalMatrix E = exp_remainder(A, dt, kappa).scaled(2.0 * dt);
    acc = zono_minkowski_sum(acc, imat_zono_product_enclosure(E, U0));
    return acc;
}

namespace {

std::vector<int> index_range(int from, int count) {
    std::vector<int> v(count);
    for (int i = 0; i < count; ++i) v[i] = from + i;
    return v;
}

std::vector<int> complement(int total, const std::vector<int>& sel) {
    std::vector<bool> used(total, false);
    for (int i : sel) used[i] = true;
    std::vector<int> out;
    for (int i = 0; i < total; ++i)
        if (!used[i]) out.push_back(i);
    return out;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& G, const std::vector<int>& idx) {
    Eigen::MatrixXd out(G.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = G.col(idx[k]);
    return out;
}

ReachSequence reach_impl(const LinearSystem& sys, const Zonotope& X0,
                         const std::vector<Zonotope>& U_steps, bool constant_input,
                         const ReachParams& params) {
    params.validate();
    const int n = sys.n();
    const int m = sys.m();
    if (X0.dim() != n) throw DimensionError("reach_sequence: X0 dimension mismatch");
    const int N = params.num_steps();
    if (static_cast<int>(U_steps.size()) != (constant_input ? 1 : N) && N > 0)
        throw DimensionError("reach_sequence: need one input set per step");

    int gamma_u = U_steps.empty() ? 0 : U_steps.front().num_generators();
    for (const Zonotope& U : U_steps) {
        if (U.dim() != m) throw DimensionError("reach_sequence: input set dimension mismatch");
        if (U.num_generators() != gamma_u)
            throw DimensionError("reach_sequence: input sets must share a generator count");
    }
    if (N == 0) gamma_u = 0;

    ReachSequence seq;
    seq.gamma_x = X0.num_generators();
    seq.gamma_u = gamma_u;
    seq.dt = params.dt;
    seq.t_end = params.t_end;

    seq.Rt.push_back(X0);
    seq.tuples.H.push_back(index_range(0, seq.gamma_x));
    seq.tuples.K.push_back({});
    seq.H.push_back(X0);
    seq.Pc.push_back(Zonotope::point(Eigen::VectorXd::Zero(n)));
    seq.D.push_back(Zonotope::point(Eigen::VectorXd::Zero(n)));
    if (N == 0) return seq;

    const Eigen::MatrixXd Ed = matrix_exponential(sys.A, params.dt);
    const Eigen::MatrixXd T = propagation_matrix(sys.A, params.dt);
    const CurvatureMatrices curv = curvature_matrices(sys.A, params.dt, params.kappa);

    // per-step input data
    struct StepInput {
        Eigen::VectorXd u_tilde;  // B c_u
        Zonotope U0;              // B (U - c_u), centered at origin
        Zonotope D_bloat;
    };
    std::vector<StepInput> steps(constant_input ? 1 : N);
    for (size_t k = 0; k < steps.size(); ++k) {
        const Zonotope& U = U_steps[k];
        steps[k].u_tilde = m > 0 ? Eigen::VectorXd(sys.B * U.c) : Eigen::VectorXd::Zero(n);
        steps[k].U0 = Zonotope(Eigen::VectorXd::Zero(n), sys.B * U.G);
        steps[k].D_bloat = input_difference_bloat(sys.A, params.dt, params.kappa, steps[k].U0);
    }
    auto step_input = [&](int i) -> const StepInput& {
        return steps[constant_input ? 0 : i];
    };

    auto curvature_of = [&](const Zonotope& Hset, const Eigen::VectorXd& u_tilde) {
        Zonotope fx = imat_zono_product_enclosure(curv.F, Hset);
        Zonotope gu = imat_zono_product_enclosure(curv.G, Zonotope::point(u_tilde));
        return zono_interval_enclosure(zono_minkowski_sum(fx, gu)).to_zonotope();
    };

    // C_0 = interval(F X0 + G u~)
    Zonotope C = curvature_of(X0, step_input(0).u_tilde);
    seq.C.push_back(C);

    for (int i = 0; i < N; ++i) {
        const StepInput& in = step_input(i);

        const Zonotope& Hi = seq.H.back();
        Zonotope Hn = zono_minkowski_sum(zono_linear_map(Ed, Hi),
                                         Zonotope::point(T * in.u_tilde));
        Zonotope Dn = zono_interval_enclosure(
                          zono_minkowski_sum(zono_linear_map(Ed, seq.D.back()), in.D_bloat))
                          .to_zonotope();
        Zonotope Pcn = zono_minkowski_sum(zono_linear_map(Ed, seq.Pc.back()),
                                          zono_linear_map(T, in.U0));
        Zonotope Pn = zono_minkowski_sum(Pcn, Dn);

        // R(t_{i+1}) = H + Pc + D: initial-state columns, then input columns
        // per step, then uncertainty columns
        Zonotope Rt = zono_minkowski_sum(Hn, Pn);
        seq.Rt.push_back(Rt);
        seq.tuples.H.push_back(index_range(0, seq.gamma_x + seq.gamma_u * (i + 1)));
        seq.tuples.K.push_back(complement(Rt.num_generators(), seq.tuples.H.back()));

        // R(tau_i) = conv(H_i, H_{i+1}) + P_{i+1} + C_i with the frozen layout
        // [0.5(G1+G2) 0.5(G1-G2) 0.5(c1-c2)] ahead of the input columns
        Zonotope conv = zono_convex_hull_enclosure(Hi, Hn);
        Zonotope Rtau = zono_minkowski_sum(zono_minkowski_sum(conv, Pn), C);
        seq.Rtau.push_back(Rtau);
        std::vector<int> Ntup = index_range(0, seq.gamma_x);
        const std::vector<int> inputs =
            index_range(2 * seq.gamma_x + 1, seq.gamma_u * (i + 1));
        Ntup.insert(Ntup.end(), inputs.begin(), inputs.end());
        seq.tuples.N.push_back(Ntup);
        seq.tuples.M.push_back(complement(Rtau.num_generators(), Ntup));

        seq.H.push_back(Hn);
        seq.Pc.push_back(Pcn);
        seq.D.push_back(Dn);

        // curvature propagation; with time-varying input centers the local
        // G u~ term is re-added so the enclosure stays valid for each step
        if (i + 1 < N) {
            C = zono_linear_map(Ed, C);
            if (!constant_input) {
                Zonotope gu = imat_zono_product_enclosure(
                    curv.G, Zonotope::point(step_input(i + 1).u_tilde));
                C = zono_interval_enclosure(zono_minkowski_sum(C, gu)).to_zonotope();
            }
            seq.C.push_back(C);
        }
    }
    return seq;
}

} // namespace

ReachSequence reach_sequence(const LinearSystem& sys, const Zonotope& X0, const Zonotope& U,
                             const ReachParams& params) {
    return reach_impl(sys, X0, {U}, true, params);
}

ReachSequence reach_sequence(const LinearSystem& sys, const Zonotope& X0,
                             const std::vector<Zonotope>& U_steps, const ReachParams& params) {
    return reach_impl(sys, X0, U_steps, false, params);
}

DependencyEval dependency_eval(const ReachSequence& seq, double t, const Eigen::VectorXd& alpha) {
    if (alpha.size() != seq.factor_dim())
        throw DimensionError("dependency_eval: factor vector has wrong dimension");
    if (alpha.cwiseAbs().maxCoeff() > 1.0 + 1e-9)
        throw Error("dependency_eval: factors must lie in [-1,1]");
    if (t < -1e-12 || t > seq.t_end + 1e-12)
        throw Error("dependency_eval: time out of range");

    const double steps = t / seq.dt;
    const long rounded = std::lround(steps);
    const bool on_grid = std::abs(steps - rounded) < 1e-9;

    DependencyEval out;
    if (on_grid) {
        const int i = static_cast<int>(rounded);
        const Zonotope& R = seq.Rt[i];
        const std::vector<int>& Hs = seq.tuples.H[i];
        const std::vector<int>& Ks = seq.tuples.K[i];
        out.mu = select_columns(R.G, Hs) * alpha.head(static_cast<Eigen::Index>(Hs.size()));
        out.error = Zonotope(R.c, select_columns(R.G, Ks));
    } else {
        const int i = static_cast<int>(std::floor(steps));
        const Zonotope& R = seq.Rtau[i];
        const std::vector<int>& Ns = seq.tuples.N[i];
        const std::vector<int>& Ms = seq.tuples.M[i];
        out.mu = select_columns(R.G, Ns) * alpha.head(static_cast<Eigen::Index>(Ns.size()));
        out.error = Zonotope(R.c, select_columns(R.G, Ms));
    }
    return out;
}

} // namespace stlverify
