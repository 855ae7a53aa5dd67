#include "stlverify/stl.hpp"

#include <algorithm>
#include <cmath>

namespace stlverify {

Eigen::VectorXd SampledTrace::state_at(double t) const {
    if (times.empty()) throw Error("SampledTrace: empty trace");
    if (t <= times.front() + 1e-12) return states.front();
    if (t >= times.back() - 1e-12) {
        if (t > times.back() + 1e-9) throw Error("SampledTrace: time beyond the trace");
        return states.back();
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const size_t j = static_cast<size_t>(it - times.begin());
    const double t0 = times[j - 1], t1 = times[j];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * states[j - 1] + w * states[j];
}

namespace {

class Monitor {
public:
    Monitor(const SampledTrace& trace) : trace_(trace) {}

    bool eval(const StlFormula& f, double t) const {
        switch (f.kind) {
            case StlKind::True:
                return true;
            case StlKind::False:
                return false;
            case StlKind::Atom: {
                const Eigen::VectorXd x = trace_.state_at(t);
                if (x.size() < f.atom_a.size())
                    throw DimensionError("monitor_trace: atom references a missing state");
                const double v = f.atom_a.dot(x.head(f.atom_a.size()));
                return f.atom_rel == AtomRel::Le ? v <= f.atom_b : v < f.atom_b;
            }
            case StlKind::Not:
                return !eval(*f.lhs, t);
            case StlKind::And:
                return eval(*f.lhs, t) && eval(*f.rhs, t);
            case StlKind::Or:
                return eval(*f.lhs, t) || eval(*f.rhs, t);
            case StlKind::Until: {
                // exists s in [a,b]: phi2 at t+s and phi1 on [t, t+s)
                const std::vector<double> witnesses = grid(t + f.t_lo, t + f.t_hi);
                for (double w : witnesses) {
                    if (!eval(*f.rhs, w)) continue;
                    bool prefix_ok = true;
                    for (double p : grid(t, w)) {
                        if (p >= w) break;
                        if (!eval(*f.lhs, p)) {
                            prefix_ok = false;
                            break;
                        }
                    }
                    if (prefix_ok) return true;
                }
                return false;
            }
            default:
                throw Error("monitor: formula must be desugared first");
        }
    }

private:
    const SampledTrace& trace_;

    // trace sample times within [a,b] plus both interval endpoints
    std::vector<double> grid(double a, double b) const {
        std::vector<double> out;
        out.push_back(a);
        for (double t : trace_.times) {
            if (t > a + 1e-12 && t < b - 1e-12) out.push_back(t);
        }
        if (b > a + 1e-12) out.push_back(b);
        return out;
    }
};

} // namespace

bool monitor_trace(const StlPtr& phi, const SampledTrace& trace) {
    if (trace.times.empty()) throw Error("monitor_trace: empty trace");
    const double horizon = formula_horizon(*phi);
    if (horizon > trace.end_time() - trace.times.front() + 1e-9)
        throw Error("monitor_trace: trace shorter than the formula horizon");
    const StlPtr core = desugar(phi);
    return Monitor(trace).eval(*core, trace.times.front());
}

} // namespace stlverify
