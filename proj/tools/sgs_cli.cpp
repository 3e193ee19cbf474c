// Command-line front end: apply the aggregation operator, export attention
// maps, run the consistency self-test, the scaling benchmark, and the
// gradient check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgs/autograd.hpp"
#include "sgs/bench.hpp"
#include "sgs/block.hpp"
#include "sgs/io.hpp"
#include "sgs/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

struct ParamSource {
    std::string params_path;
    std::uint64_t seed = 1;
};

// Params bundle file: four concatenated tensors appended as one stream is
// awkward with a sized format, so the bundle is four separate "SGST" files
// referenced by a stem: <stem>.lambda, <stem>.psi, <stem>.alpha, <stem>.beta.
sgs::BlockParams load_or_make_params(const ParamSource& src, int C, bool normalized) {
    sgs::BlockParams p;
    if (!src.params_path.empty()) {
        sgs::Tensor3 lam = sgs::load_tensor(src.params_path + ".lambda");
        sgs::Tensor3 psi = sgs::load_tensor(src.params_path + ".psi");
        sgs::Tensor3 alpha = sgs::load_tensor(src.params_path + ".alpha");
        sgs::Tensor3 beta = sgs::load_tensor(src.params_path + ".beta");
        if (lam.C != 1 || lam.W != C || psi.C != 1 || psi.H != C || psi.W != C) {
            throw std::invalid_argument("params bundle does not match input channels");
        }
        p.lambda_matrix = sgs::Matrix(lam.H, lam.W);
        p.lambda_matrix.v = lam.values;
        p.psi_matrix = sgs::Matrix(psi.H, psi.W);
        p.psi_matrix.v = psi.values;
        p.scale.alpha = alpha.values.at(0);
        p.scale.beta = beta.values.at(0);
        if (!(p.scale.alpha > 0) || !(p.scale.beta > 0)) {
            throw std::invalid_argument("params bundle: alpha/beta must be > 0");
        }
    } else {
        p = sgs::random_block_params(C, sgs::default_reduced_channels(C), src.seed);
    }
    p.normalized = normalized;
    return p;
}

bool parse_pos(const std::string& s, sgs::Position& u) {
    return std::sscanf(s.c_str(), "%d,%d", &u.x, &u.y) == 2;
}

std::vector<std::pair<int, int>> parse_sizes(const std::vector<std::string>& specs) {
    std::vector<std::pair<int, int>> sizes;
    for (const std::string& s : specs) {
        int w = 0, h = 0;
        if (std::sscanf(s.c_str(), "%dx%d", &w, &h) != 2 || w < 1 || h < 1) {
            throw std::invalid_argument("bad size '" + s + "', expected WxH");
        }
        sizes.emplace_back(h, w);
    }
    return sizes;
}

int cmd_apply(const std::string& input_path, const std::string& output_path,
              const ParamSource& src, int levels, bool normalized, bool parallel) {
    sgs::Tensor3 input = sgs::load_tensor(input_path);
    sgs::BlockParams params = load_or_make_params(src, input.C, normalized);
    sgs::HierarchyConfig cfg{levels, true};
    sgs::EvalCounter counter;
    sgs::FilterOptions opts{parallel};
    sgs::Tensor3 out = sgs::hierarchical_apply(input, cfg, {params}, &counter, opts);
    sgs::save_tensor(output_path, out);
    std::uint64_t per_level =
        4ull * input.W * input.H - 2ull * (input.W + input.H);
    std::cout << "edge_evals " << counter.count() << "\n"
              << "analytic_per_level " << per_level << "\n";
    return kExitOk;
}

int cmd_attention(const std::string& input_path, const std::string& output_path,
                  const ParamSource& src, const std::string& pos_spec, int levels,
                  bool normalized, double epsilon) {
    sgs::Tensor3 input = sgs::load_tensor(input_path);
    sgs::Position u;
    if (!parse_pos(pos_spec, u)) throw std::invalid_argument("bad --pos, expected x,y");
    if (!input.in_bounds(u)) throw std::invalid_argument("--pos out of bounds");
    sgs::BlockParams params = load_or_make_params(src, input.C, normalized);
    sgs::Matrix map(0, 0);
    if (levels == 1) {
        map = sgs::attention_slice_as_map(sgs::attention_slice(input, params, u),
                                          input.H, input.W);
    } else {
        sgs::HierarchyConfig cfg{levels, true};
        map = sgs::effective_attention(input, cfg, {params}, u, epsilon);
    }
    sgs::export_pgm(map, output_path);
    return kExitOk;
}

int cmd_selftest(const std::vector<std::string>& size_specs, std::uint64_t seed,
                 bool inject_fault) {
    std::vector<std::pair<int, int>> sizes =
        size_specs.empty() ? sgs::default_selftest_sizes() : parse_sizes(size_specs);
    sgs::set_fault_injection(inject_fault);
    std::vector<sgs::CheckResult> results = sgs::run_selftest(sizes, seed);
    sgs::set_fault_injection(false);
    bool all_pass = true;
    std::printf("%-20s %-6s %s\n", "check", "status", "max_err");
    for (const auto& r : results) {
        std::printf("%-20s %-6s %.3e\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                    r.max_err);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const sgs::BenchConfig& cfg, const std::string& output_path) {
    sgs::BenchReport report = sgs::run_bench(cfg);
    std::string text = sgs::format_report(report);
    if (!output_path.empty()) {
        std::ofstream out(output_path);
        out << text;
    }
    std::cout << text;
    return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, double h, double tolerance) {
    struct Case {
        int C, H, W;
        bool normalized;
    };
    const std::vector<Case> grid = {
        {1, 3, 3, false}, {2, 4, 5, false}, {3, 6, 6, false},
        {1, 3, 3, true},  {2, 4, 5, true},  {3, 6, 6, true},
    };
    const char* names[] = {"d_input", "d_alpha", "d_beta", "d_lambda", "d_psi"};
    const sgs::FdComponent comps[] = {
        sgs::FdComponent::Input, sgs::FdComponent::Alpha, sgs::FdComponent::Beta,
        sgs::FdComponent::Lambda, sgs::FdComponent::Psi};
    double worst[5] = {};
    for (const Case& c : grid) {
        sgs::Tensor3 input = sgs::random_tensor(c.C, c.H, c.W, seed);
        sgs::BlockParams params = sgs::random_block_params(
            c.C, sgs::default_reduced_channels(c.C), seed + 7);
        params.normalized = c.normalized;
        for (int i = 0; i < 5; ++i) {
            double err = sgs::finite_diff_check_block(input, params, comps[i], h,
                                                      seed + 99);
            worst[i] = std::max(worst[i], err);
        }
    }
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
        std::printf("%-9s max_rel_err %.3e %s\n", names[i], worst[i],
                    worst[i] <= tolerance ? "pass" : "FAIL");
        ok = ok && worst[i] <= tolerance;
    }
    return ok ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-global shape-aware aggregation operator"};
    app.require_subcommand(1);

    // apply
    auto* apply = app.add_subcommand("apply", "Filter a tensor file through hierarchical blocks");
    std::string in_path, out_path, params_path;
    std::uint64_t seed = 1;
    int levels = 1;
    bool normalized = false, parallel = false;
    apply->add_option("input", in_path, "input tensor file")->required();
    apply->add_option("-o,--output", out_path, "output tensor file")->required();
    apply->add_option("--params", params_path, "params bundle stem");
    apply->add_option("--seed", seed, "seed for generated params");
    apply->add_option("--levels", levels, "hierarchical levels")->check(CLI::PositiveNumber);
    apply->add_flag("--normalized", normalized, "divide the aggregation branch by S");
    apply->add_flag("--parallel", parallel, "filter chains on multiple threads");

    // attention
    auto* attention = app.add_subcommand("attention", "Export an attention map as PGM");
    std::string att_in, att_out, att_params, pos_spec;
    std::uint64_t att_seed = 1;
    int att_levels = 1;
    bool att_normalized = false;
    double epsilon = 1e-4;
    attention->add_option("input", att_in, "input tensor file")->required();
    attention->add_option("-o,--output", att_out, "output PGM path")->required();
    attention->add_option("--pos", pos_spec, "position as x,y")->required();
    attention->add_option("--params", att_params, "params bundle stem");
    attention->add_option("--seed", att_seed, "seed for generated params");
    attention->add_option("--levels", att_levels, "hierarchical levels")->check(CLI::PositiveNumber);
    attention->add_flag("--normalized", att_normalized, "normalized mode");
    attention->add_option("--epsilon", epsilon, "perturbation size for levels >= 2");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "Run oracle-equivalence and invariance checks");
    std::vector<std::string> size_specs;
    std::uint64_t st_seed = 42;
    bool inject_fault = false;
    selftest->add_option("--sizes", size_specs, "sizes as WxH (e.g. 8x8)");
    selftest->add_option("--seed", st_seed, "random seed");
    selftest->add_flag("--inject-fault", inject_fault,
                       "corrupt one edge weight to prove suite sensitivity");

    // bench
    auto* bench = app.add_subcommand("bench", "Measure fast-path vs oracle scaling");
    sgs::BenchConfig bench_cfg;
    std::string bench_out;
    bench->add_option("--min", bench_cfg.min_side, "smallest square side");
    bench->add_option("--max", bench_cfg.max_side, "largest square side");
    bench->add_option("--points", bench_cfg.num_points, "number of sizes");
    bench->add_option("--oracle-max", bench_cfg.oracle_max_side,
                      "largest side timed with the brute-force oracle");
    bench->add_option("--seed", bench_cfg.seed, "random seed");
    bench->add_option("-o,--output", bench_out, "report file path");
    bench->add_flag("--parallel", bench_cfg.parallel,
                    "allow multi-threaded chains (off keeps slopes clean)");

    // gen
    auto* gen = app.add_subcommand("gen", "Write a random tensor file");
    std::string gen_out, shape_spec = "3x8x8";
    std::uint64_t gen_seed = 1;
    bool gen_f32 = false;
    gen->add_option("-o,--output", gen_out, "output tensor file")->required();
    gen->add_option("--shape", shape_spec, "shape as CxHxW");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_flag("--f32", gen_f32, "store 32-bit floats");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "Verify gradients against finite differences");
    std::uint64_t gc_seed = 5;
    double gc_h = 1e-5, gc_tol = 1e-5;
    gradcheck->add_option("--seed", gc_seed, "random seed");
    gradcheck->add_option("--step", gc_h, "finite-difference step")->check(CLI::PositiveNumber);
    gradcheck->add_option("--tolerance", gc_tol, "max relative error");

    CLI11_PARSE(app, argc, argv);

    try {
        if (apply->parsed()) {
            return cmd_apply(in_path, out_path, {params_path, seed}, levels,
                             normalized, parallel);
        }
        if (attention->parsed()) {
            return cmd_attention(att_in, att_out, {att_params, att_seed}, pos_spec,
                                 att_levels, att_normalized, epsilon);
        }
        if (gen->parsed()) {
            int c = 0, h = 0, w = 0;
            if (std::sscanf(shape_spec.c_str(), "%dx%dx%d", &c, &h, &w) != 3) {
                throw std::invalid_argument("bad --shape, expected CxHxW");
            }
            sgs::save_tensor(gen_out, sgs::random_tensor(c, h, w, gen_seed),
                             gen_f32 ? sgs::Dtype::Float32 : sgs::Dtype::Float64);
            return kExitOk;
        }
        if (selftest->parsed()) return cmd_selftest(size_specs, st_seed, inject_fault);
        if (bench->parsed()) return cmd_bench(bench_cfg, bench_out);
        if (gradcheck->parsed()) return cmd_gradcheck(gc_seed, gc_h, gc_tol);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
