#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "fpna/experiments.hpp"

namespace {

using nlohmann::json;

json load_spec(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--spec", "cannot open spec file: " + path);
    return json::parse(in);
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

void parse_dist(const json& j, const char* key, fpna::DistSpec& dist) {
    if (!j.contains(key)) return;
    const json& d = j.at(key);
    if (d.contains("tag")) {
        std::string tag = d.at("tag");
        if (tag == "uniform")
            dist.tag = fpna::DistTag::Uniform;
        else if (tag == "normal")
            dist.tag = fpna::DistTag::Normal;
        else
            throw CLI::ValidationError("spec", "unknown dist tag: " + tag);
    }
    maybe(d, "a", dist.a);
    maybe(d, "b", dist.b);
}

struct CommonOpts {
    std::string spec_path;
    std::string out_dir = "fpna-out";
    std::size_t threads = fpna::ThreadPool::default_thread_count();
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--spec", opts.spec_path, "JSON experiment spec file");
    cmd->add_option("--out", opts.out_dir, "output directory for report files");
    cmd->add_option("--threads", opts.threads, "worker pool size")
        ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
    cmd->add_option("--seed", opts.seed, "override the master seed");
}

void emit(const fpna::ExperimentReport& report, const CommonOpts& opts) {
    fpna::emit_report(report, opts.out_dir);
    std::printf("wrote %s report to %s\n", report.kind.c_str(), opts.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"floating-point non-associativity variability lab"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* permute = app.add_subcommand("permute-demo",
                                       "deterministic vs permuted serial sums");
    auto* pdf = app.add_subcommand("pdf", "V_s probability density under replay");
    auto* maxvs = app.add_subcommand("maxvs", "max |V_s| growth vs array size");
    auto* determinism =
        app.add_subcommand("determinism", "bitwise run-to-run determinism check");
    auto* bench = app.add_subcommand("bench", "relative timing of the sum variants");
    auto* ops = app.add_subcommand("ops", "tensor-op (dim x ratio) variability sweep");
    auto* gnn = app.add_subcommand("gnn", "graph-aggregation forward-pass variability");
    for (auto* cmd : {permute, pdf, maxvs, determinism, bench, ops, gnn})
        add_common(cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        json spec = load_spec(opts.spec_path);
        fpna::ThreadPool pool(opts.threads);

        if (*permute) {
            fpna::PermuteDemoParams p;
            maybe(spec, "sizes", p.sizes);
            maybe(spec, "arrays_per_size", p.arrays_per_size);
            maybe(spec, "permutations_per_array", p.permutations_per_array);
            parse_dist(spec, "dist", p.dist);
            maybe(spec, "seed", p.seed);
            if (opts.seed) p.seed = *opts.seed;
            emit(to_report(fpna::run_permute_demo(p, pool)), opts);
        } else if (*pdf) {
            fpna::PdfParams p;
            maybe(spec, "n", p.n);
            maybe(spec, "arrays", p.arrays);
            maybe(spec, "samples_per_array", p.samples_per_array);
            if (spec.contains("variant"))
                p.variant = fpna::variant_from_string(spec.at("variant"));
            parse_dist(spec, "dist", p.dist);
            maybe(spec, "n_t", p.n_t);
            maybe(spec, "bins", p.bins);
            maybe(spec, "seed", p.seed);
            if (opts.seed) p.seed = *opts.seed;
            auto result = fpna::run_pdf(p, pool);
            emit(to_report(result), opts);
            std::printf("kl_to_gaussian = %g, bound violations = %zu\n", result.kl,
                        result.bound_violations);
            if (result.bound_violations != 0) return 1;
        } else if (*maxvs) {
            fpna::MaxVsParams p;
            maybe(spec, "n_values", p.n_values);
            maybe(spec, "arrays_per_n", p.arrays_per_n);
            maybe(spec, "samples_per_array", p.samples_per_array);
            parse_dist(spec, "dist", p.dist);
            maybe(spec, "n_t", p.n_t);
            maybe(spec, "seed", p.seed);
            if (opts.seed) p.seed = *opts.seed;
            auto result = fpna::run_maxvs_sweep(p, pool);
            emit(to_report(result), opts);
            std::printf("alpha = %g, beta = %g, r2 = %g\n", result.fit.alpha,
                        result.fit.beta, result.fit.r2);
            if (result.bound_violations != 0) return 1;
        } else if (*determinism) {
            fpna::DeterminismParams p;
            maybe(spec, "arrays", p.arrays);
            maybe(spec, "n", p.n);
            maybe(spec, "runs", p.runs);
            maybe(spec, "thread_counts", p.thread_counts);
            maybe(spec, "n_t", p.n_t);
            parse_dist(spec, "dist", p.dist);
            maybe(spec, "seed", p.seed);
            maybe(spec, "include_nondet", p.include_nondet);
            maybe(spec, "nondet_runs", p.nondet_runs);
            if (opts.seed) p.seed = *opts.seed;
            auto result = fpna::run_determinism_check(p);
            emit(to_report(result), opts);
            std::printf("determinism: %s\n", result.deterministic_pass ? "PASS" : "FAIL");
            if (!result.deterministic_pass || !result.spsrc_equals_sps_single_block)
                return 1;
        } else if (*bench) {
            fpna::BenchParams p;
            maybe(spec, "n", p.n);
            maybe(spec, "sums_per_trial", p.sums_per_trial);
            maybe(spec, "trials", p.trials);
            maybe(spec, "n_t", p.n_t);
            if (spec.contains("variants")) {
                p.variants.clear();
                for (const auto& name : spec.at("variants"))
                    p.variants.push_back(fpna::variant_from_string(name));
            }
            parse_dist(spec, "dist", p.dist);
            maybe(spec, "seed", p.seed);
            if (opts.seed) p.seed = *opts.seed;
            emit(to_report(fpna::run_bench(p, pool)), opts);
        } else if (*ops) {
            fpna::OpSweepParams p;
            if (spec.contains("op")) p.op = fpna::tensor_op_from_string(spec.at("op"));
            maybe(spec, "dims", p.dims);
            maybe(spec, "ratios", p.ratios);
            maybe(spec, "runs", p.runs);
            maybe(spec, "cols", p.cols);
            if (spec.contains("mode"))
                p.mode = fpna::exec_mode_from_string(spec.at("mode"));
            maybe(spec, "seed", p.seed);
            if (opts.seed) p.seed = *opts.seed;
            emit(to_report(fpna::run_op_sweep(p, pool)), opts);
        } else if (*gnn) {
            fpna::GnnDemoParams p;
            maybe(spec, "num_nodes", p.num_nodes);
            maybe(spec, "num_edges", p.num_edges);
            maybe(spec, "feature_dim", p.feature_dim);
            maybe(spec, "hidden_dim", p.hidden_dim);
            maybe(spec, "runs", p.runs);
            maybe(spec, "seed", p.seed);
            if (opts.seed) p.seed = *opts.seed;
            auto result = fpna::run_gnn_demo(p, pool);
            emit(to_report(result), opts);
            std::printf("deterministic v_c = %g, replay mean v_c = %g\n",
                        result.det_max_v_c, result.replay_mean_v_c);
            if (result.det_max_v_c != 0.0) return 1;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
