#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "stlverify/problem.hpp"

using namespace stlverify;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitError = 3;

struct CommonArgs {
    std::string problem_path;
    std::string spec_override;
    std::string out_dir = ".";
    int max_iter = 12;
    double dt_init = 0.0;
    double epsilon = 1e-6;
    std::string baseline;
    bool emit_reach = false;
    std::string proj = "1,2";
    std::uint64_t seed = 0;
};

ProblemFile load(const CommonArgs& args) {
    ProblemFile p = load_problem(args.problem_path);
    if (!args.spec_override.empty()) {
        p.spec_text = args.spec_override;
        p.parse_spec();  // validate the override
        if (max_state_index(*p.parse_spec()) > p.sys.n())
            throw Error("--spec references a state beyond the system dimension");
    }
    return p;
}

std::pair<int, int> parse_projection(const std::string& proj, int n) {
    int a = 1, b = 2;
    if (std::sscanf(proj.c_str(), "%d,%d", &a, &b) != 2)
        throw Error("--proj expects two comma-separated 1-based indices");
    if (a < 1 || b < 1 || a > n || b > n || a == b)
        throw Error("--proj indices out of range");
    return {a - 1, b - 1};
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

int run_verify(const CommonArgs& args, bool falsify_only) {
    const ProblemFile p = load(args);
    const StlPtr phi = p.parse_spec();

    VerifierConfig cfg;
    cfg.max_iterations = args.max_iter;
    cfg.dt_init = args.dt_init;
    cfg.epsilon = args.epsilon;
    cfg.falsify_only = falsify_only;
    cfg.run_wholeset_baseline = args.baseline == "wholeset";

    const auto start = std::chrono::steady_clock::now();
    const Verdict verdict = verify(p.sys, p.X0, p.input, phi, cfg);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    fs::create_directories(args.out_dir);
    write_json(verdict_to_json(verdict, wall_ms), fs::path(args.out_dir) / "verdict.json");

    if (verdict.counterexample) {
        write_counterexample_csv(*verdict.counterexample,
                                 (fs::path(args.out_dir) / "counterexample.csv").string());
    }

    if (args.emit_reach) {
        // reproduce the final iteration's reach sequence for plotting
        const double dt = verdict.dt_final;
        const StlPtr sampled = to_sampled_time(negation_normal_form(phi), dt);
        const int steps = sampled_horizon_steps(sampled, dt);
        ReachParams params{dt, steps * dt, std::max(verdict.kappa_final, 2)};
        bool exact = true;
        const ReachSequence seq =
            p.input.time_varying()
                ? reach_sequence(p.sys, p.X0, p.input.resample(dt, steps, &exact), params)
                : reach_sequence(p.sys, p.X0, p.input.constant, params);
        const auto [px, py] = parse_projection(args.proj, p.sys.n());
        write_json(reach_to_json(seq, px, py), fs::path(args.out_dir) / "reach.json");
    }

    std::cout << to_string(verdict.result) << " after " << verdict.iterations
              << " iteration(s), dt = " << verdict.dt_final << "\n";
    switch (verdict.result) {
        case VerdictResult::Safe: return kExitSafe;
        case VerdictResult::Unsafe: return kExitUnsafe;
        case VerdictResult::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

int run_predict(const CommonArgs& args, double dt, int kappa) {
    const ProblemFile p = load(args);
    const StlPtr phi = p.parse_spec();

    const Prediction pred = predict_safe_behaviors(p.sys, p.X0, p.input, phi, dt, kappa);
    fs::create_directories(args.out_dir);
    write_json(occupancy_to_json(pred), fs::path(args.out_dir) / "occupancy.json");
    std::cout << "occupancy with " << pred.legal_factors.size() << " legal factor polytope(s), "
              << pred.reach.num_steps() << " steps\n";
    return kExitSafe;
}

int run_bench(const std::string& name, const json& params, const std::string& out_path,
              bool list) {
    if (list) {
        for (const std::string& n : benchmark_names()) std::cout << n << "\n";
        return kExitSafe;
    }
    const ProblemFile p = generate_benchmark(name, params);
    if (out_path.empty()) {
        std::cout << problem_to_json(p).dump(2) << "\n";
    } else {
        save_problem(p, out_path);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitSafe;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Automated STL verifier for linear time-invariant systems"};
    app.require_subcommand(1);

    CommonArgs args;
    double predict_dt = 0.05;
    int predict_kappa = 10;
    std::string bench_name, bench_out, bench_variant;
    int bench_N = 25;
    double bench_threshold = -1;
    bool bench_list = false;

    auto add_common = [&](CLI::App* cmd, bool needs_problem) {
        auto* popt = cmd->add_option("--problem", args.problem_path, "problem JSON file");
        if (needs_problem) popt->required();
        cmd->add_option("--spec", args.spec_override, "inline STL formula overriding the file");
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--max-iter", args.max_iter, "refinement iteration cap");
        cmd->add_option("--dt-init", args.dt_init, "initial time step (default: formula horizon)");
        cmd->add_option("--epsilon", args.epsilon, "strictness tolerance of the MILP");
        cmd->add_option("--baseline", args.baseline, "also evaluate a baseline (wholeset)");
        cmd->add_flag("--emit-reach", args.emit_reach, "write reach.json for plotting");
        cmd->add_option("--proj", args.proj, "projection dims for shadows, e.g. 1,2");
        cmd->add_option("--seed", args.seed, "seed for Monte-Carlo validation workflows");
    };

    CLI::App* verify_cmd = app.add_subcommand("verify", "verify or falsify a specification");
    add_common(verify_cmd, true);

    CLI::App* falsify_cmd =
        app.add_subcommand("falsify-only", "search counterexamples without the safety check");
    add_common(falsify_cmd, true);

    CLI::App* predict_cmd =
        app.add_subcommand("predict", "set-based prediction of legal behaviors");
    add_common(predict_cmd, true);
    predict_cmd->add_option("--dt", predict_dt, "time step for the single model-check pass");
    predict_cmd->add_option("--kappa", predict_kappa, "truncation order");

    CLI::App* bench_cmd = app.add_subcommand("bench", "generate a built-in benchmark problem");
    bench_cmd->add_option("--name", bench_name, "benchmark name");
    bench_cmd->add_option("--variant", bench_variant, "benchmark variant");
    bench_cmd->add_option("--N", bench_N, "size parameter (heat1d)");
    bench_cmd->add_option("--threshold", bench_threshold, "threshold parameter (heat1d)");
    bench_cmd->add_option("--out", bench_out, "output problem file (default: stdout)");
    bench_cmd->add_flag("--list", bench_list, "list benchmark names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify_cmd->parsed()) return run_verify(args, false);
        if (falsify_cmd->parsed()) return run_verify(args, true);
        if (predict_cmd->parsed()) return run_predict(args, predict_dt, predict_kappa);
        if (bench_cmd->parsed()) {
            json params = json::object();
            if (!bench_variant.empty()) params["variant"] = bench_variant;
            params["N"] = bench_N;
            if (bench_threshold >= 0) params["threshold"] = bench_threshold;
            return run_bench(bench_name, params, bench_out, bench_list);
        }
    } catch (const ParseError& e) {
        std::cerr << "specification error: " << e.what() << "\n";
        return kExitError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitError + 1;
    }
    return kExitError;
}
