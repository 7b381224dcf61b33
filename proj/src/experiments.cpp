#include "fpna/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "fpna/metrics.hpp"

namespace fpna {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty input");
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Serial engine whose parallel_for runs inline; safe to use from inside
// another pool's workers (no nested task submission).
ThreadPool& serial_pool() {
    static ThreadPool pool(1);
    return pool;
}

std::vector<std::string> row_strings(std::initializer_list<std::string> cells) {
    return {cells};
}

nlohmann::json dist_json(const DistSpec& d) {
    return {{"tag", to_string(d.tag)}, {"a", d.a}, {"b", d.b}};
}

}  // namespace

FpArray DistSpec::make(RngSpec rng, std::size_t n) const {
    switch (tag) {
        case DistTag::Uniform: return FpArray::uniform(rng, n, a, b);
        case DistTag::Normal: return FpArray::normal(rng, n, a, b);
        case DistTag::Explicit: break;
    }
    throw std::invalid_argument("DistSpec: explicit tag cannot generate data");
}

// ---------------------------------------------------------------------------
// permute-demo

PermuteDemoResult run_permute_demo(const PermuteDemoParams& params, ThreadPool& pool) {
    if (params.sizes.empty())
        throw std::invalid_argument("permute_demo: sizes must be non-empty");
    PermuteDemoResult result;
    result.params = params;

    const std::size_t per_size = params.arrays_per_size * params.permutations_per_array;
    result.rows.resize(params.sizes.size() * per_size);

    std::atomic<std::size_t> violations{0};
    for (std::size_t si = 0; si < params.sizes.size(); ++si) {
        const std::size_t n = params.sizes[si];
        pool.parallel_for(params.arrays_per_size, [&, si, n](std::size_t a) {
            std::uint64_t array_seed = derive_seed(params.seed, si * 1009 + a);
            FpArray x = params.dist.make({params.algorithm, array_seed}, n);
            double s_d = recursive_sum(x);
            double bound = error_bound(x);
            for (std::size_t p = 0; p < params.permutations_per_array; ++p) {
                std::uint64_t perm_seed = derive_seed(array_seed, p + 1);
                double s_nd = recursive_sum(permute(x, perm_seed));
                PermuteDemoRow row;
                row.n = n;
                row.array_seed = array_seed;
                row.perm_seed = perm_seed;
                row.s_d = s_d;
                row.s_nd = s_nd;
                row.diff = s_nd - s_d;
                row.vs = v_s(s_d, s_nd);
                if (std::fabs(s_d - s_nd) > bound) ++violations;
                result.rows[si * per_size + a * params.permutations_per_array + p] = row;
            }
        });
    }
    result.bound_violations = violations.load();

    for (std::size_t si = 0; si < params.sizes.size(); ++si) {
        std::vector<double> abs_vs;
        abs_vs.reserve(per_size);
        for (std::size_t i = 0; i < per_size; ++i)
            abs_vs.push_back(std::fabs(result.rows[si * per_size + i].vs));
        result.median_abs_vs[params.sizes[si]] = median(std::move(abs_vs));
    }
    return result;
}

ExperimentReport to_report(const PermuteDemoResult& r) {
    ExperimentReport rep;
    rep.kind = "permute_demo";
    rep.doc = report_skeleton(rep.kind);
    rep.doc["spec"] = {{"sizes", r.params.sizes},
                       {"arrays_per_size", r.params.arrays_per_size},
                       {"permutations_per_array", r.params.permutations_per_array},
                       {"dist", dist_json(r.params.dist)},
                       {"algorithm", to_string(r.params.algorithm)},
                       {"seed", r.params.seed}};
    rep.doc["bound_violations"] = r.bound_violations;
    auto& med = rep.doc["median_abs_vs"];
    for (auto [n, m] : r.median_abs_vs) med[std::to_string(n)] = m;

    ExperimentReport::Table runs;
    runs.name = "runs";
    runs.columns = {"n", "array_seed", "perm_seed", "s_d", "s_nd", "diff", "v_s"};
    for (const auto& row : r.rows)
        runs.rows.push_back(row_strings(
            {std::to_string(row.n), std::to_string(row.array_seed),
             std::to_string(row.perm_seed), format_double(row.s_d),
             format_double(row.s_nd), format_double(row.diff), format_double(row.vs)}));
    rep.tables.push_back(std::move(runs));

    std::vector<LineSeries> series(1);
    series[0].name = "median |V_s|";
    for (auto [n, m] : r.median_abs_vs)
        if (m > 0.0) series[0].points.emplace_back(static_cast<double>(n), m);
    if (!series[0].points.empty())
        rep.charts.push_back(
            {"median_vs", svg_loglog(series, "median |V_s| vs array size", "n", "|V_s|")});
    return rep;
}

// ---------------------------------------------------------------------------
// pdf

namespace {

// Replay V_s samples of a nondeterministic variant against the SPS
// reference, one array at a time. Commit units are the block partials for
// SPSA and the raw elements for AO; folding along a fresh Fisher-Yates
// permutation per sample reproduces exactly what ReductionEngine::reduce
// does under SeededReplay.
struct ReplaySampler {
    Variant variant;
    std::size_t n_t;

    // vs_out must have room for samples entries.
    // Returns the number of bound violations; *ref_out (if given) receives
    // the SPS reference value the samples were scored against.
    std::size_t sample_array(const FpArray& x, std::uint64_t array_seed,
                             std::size_t samples, double* vs_out,
                             double* ref_out = nullptr) const {
        ReductionEngine engine(serial_pool());
        KernelGeometry g = KernelGeometry::for_size(x.size(), n_t);
        std::vector<double> partials;
        std::span<const double> units;
        if (variant == Variant::SPSA) {
            partials = engine.block_reduce(x.values(), g);
            units = partials;
        } else if (variant == Variant::AO) {
            units = x.values();
        } else {
            throw std::invalid_argument("replay sampling needs a nondeterministic variant");
        }

        SumResult ref = engine.reduce(x, {Variant::SPS, g});
        if (ref_out) *ref_out = ref.value;
        const double bound = error_bound(x);
        std::size_t violations = 0;

        std::vector<std::uint32_t> order(units.size());
        for (std::size_t s = 0; s < samples; ++s) {
            std::iota(order.begin(), order.end(), 0u);
            shuffle_indices(order, derive_seed(array_seed, s + 1));
            double acc = 0.0;
            for (std::uint32_t i : order) acc += units[i];
            vs_out[s] = v_s(ref.value, acc);
            if (std::fabs(ref.value - acc) > bound) ++violations;
        }
        return violations;
    }
};

// V_s samples for a fixed array live on a lattice: the achievable sums are
// binary64 values in the reference's neighborhood, so V_s differences come in
// multiples of ulp(ref)/|ref|. Bins narrower than that step produce a comb
// whose KL against any smooth fit saturates near log(occupancy), regardless
// of how Gaussian the underlying distribution is. Snap the bin width to a
// whole number of lattice steps (anchored so V_s = 0 sits at a cell center)
// whenever the lattice is coarser than the requested binning.
Histogram vs_histogram(std::span<const double> samples, std::size_t bins,
                       double lattice_step) {
    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it, hi = *hi_it;
    double naive_width = (hi - lo) / static_cast<double>(bins);
    if (!(lattice_step > 0.0) || !std::isfinite(lattice_step) ||
        lattice_step <= naive_width || lo == hi)
        return histogram(samples, bins);

    const double width = lattice_step;
    const double e0 = (std::round(lo / width) - 0.5) * width;
    const auto m = static_cast<std::size_t>(std::ceil((hi - e0) / width));
    Histogram h;
    h.bin_edges.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i)
        h.bin_edges[i] = e0 + width * static_cast<double>(i);
    h.counts.assign(m, 0);
    for (double v : samples) {
        auto idx = static_cast<std::size_t>((v - e0) / width);
        if (idx >= m) idx = m - 1;
        ++h.counts[idx];
    }
    h.total = samples.size();
    return h;
}

double relative_ulp(double ref) {
    if (ref == 0.0 || !std::isfinite(ref)) return 0.0;
    return (std::nextafter(std::fabs(ref), HUGE_VAL) - std::fabs(ref)) /
           std::fabs(ref);
}

}  // namespace

PdfResult run_pdf(const PdfParams& params, ThreadPool& pool) {
    if (is_deterministic(params.variant))
        throw std::invalid_argument("run_pdf: variant must be nondeterministic");
    PdfResult result;
    result.params = params;
    result.vs_samples.resize(params.arrays * params.samples_per_array);

    std::atomic<std::size_t> violations{0};
    std::vector<double> references(params.arrays, 0.0);
    ReplaySampler sampler{params.variant, params.n_t};
    pool.parallel_for(params.arrays, [&](std::size_t a) {
        std::uint64_t array_seed = derive_seed(params.seed, a);
        FpArray x = params.dist.make({params.algorithm, array_seed}, params.n);
        violations += sampler.sample_array(
            x, array_seed, params.samples_per_array,
            result.vs_samples.data() + a * params.samples_per_array,
            &references[a]);
    });
    result.bound_violations = violations.load();

    std::vector<double> steps(params.arrays);
    for (std::size_t a = 0; a < params.arrays; ++a)
        steps[a] = relative_ulp(references[a]);
    std::sort(steps.begin(), steps.end());
    result.hist = vs_histogram(result.vs_samples, params.bins,
                               steps[steps.size() / 2]);
    result.fit = fit_gaussian(result.vs_samples);
    result.kl = kl_to_gaussian(result.hist, result.fit);
    return result;
}

ExperimentReport to_report(const PdfResult& r) {
    ExperimentReport rep;
    rep.kind = "pdf";
    rep.doc = report_skeleton(rep.kind);
    rep.doc["spec"] = {{"n", r.params.n},
                       {"arrays", r.params.arrays},
                       {"samples_per_array", r.params.samples_per_array},
                       {"variant", to_string(r.params.variant)},
                       {"dist", dist_json(r.params.dist)},
                       {"algorithm", to_string(r.params.algorithm)},
                       {"n_t", r.params.n_t},
                       {"bins", r.params.bins},
                       {"seed", r.params.seed}};
    rep.doc["gaussian_fit"] = {{"mu", r.fit.mu}, {"sigma", r.fit.sigma}};
    rep.doc["kl_to_gaussian"] = r.kl;
    rep.doc["bound_violations"] = r.bound_violations;
    rep.doc["histogram"] = {{"bin_edges", r.hist.bin_edges},
                            {"counts", r.hist.counts},
                            {"total", r.hist.total}};

    ExperimentReport::Table samples;
    samples.name = "samples";
    samples.columns = {"sample", "v_s"};
    for (std::size_t i = 0; i < r.vs_samples.size(); ++i)
        samples.rows.push_back(
            row_strings({std::to_string(i), format_double(r.vs_samples[i])}));
    rep.tables.push_back(std::move(samples));

    rep.charts.push_back(
        {"hist", svg_histogram(r.hist, "V_s density, " + to_string(r.params.variant))});
    return rep;
}

// ---------------------------------------------------------------------------
// maxvs

MaxVsResult run_maxvs_sweep(const MaxVsParams& params, ThreadPool& pool) {
    if (params.n_values.size() < 3)
        throw std::invalid_argument("maxvs: need at least 3 sizes");
    MaxVsResult result;
    result.params = params;

    ReplaySampler sampler{Variant::SPSA, params.n_t};
    std::atomic<std::size_t> violations{0};
    for (std::size_t ni = 0; ni < params.n_values.size(); ++ni) {
        const std::size_t n = params.n_values[ni];
        std::vector<double> vs(params.arrays_per_n * params.samples_per_array);
        pool.parallel_for(params.arrays_per_n, [&, ni, n](std::size_t a) {
            std::uint64_t array_seed = derive_seed(params.seed, ni * 613 + a);
            FpArray x = params.dist.make({params.algorithm, array_seed}, n);
            violations += sampler.sample_array(x, array_seed, params.samples_per_array,
                                               vs.data() + a * params.samples_per_array);
        });
        result.max_vs.emplace_back(static_cast<double>(n), max_abs(vs));
    }
    result.bound_violations = violations.load();
    result.fit = fit_power_law(result.max_vs);
    return result;
}

ExperimentReport to_report(const MaxVsResult& r) {
    ExperimentReport rep;
    rep.kind = "maxvs";
    rep.doc = report_skeleton(rep.kind);
    rep.doc["spec"] = {{"n_values", r.params.n_values},
                       {"arrays_per_n", r.params.arrays_per_n},
                       {"samples_per_array", r.params.samples_per_array},
                       {"dist", dist_json(r.params.dist)},
                       {"algorithm", to_string(r.params.algorithm)},
                       {"n_t", r.params.n_t},
                       {"seed", r.params.seed}};
    rep.doc["fit"] = {{"alpha", r.fit.alpha}, {"beta", r.fit.beta}, {"r2", r.fit.r2}};
    rep.doc["bound_violations"] = r.bound_violations;

    ExperimentReport::Table cells;
    cells.name = "maxvs";
    cells.columns = {"n", "max_abs_vs"};
    for (auto [n, m] : r.max_vs)
        cells.rows.push_back(row_strings({format_double(n), format_double(m)}));
    rep.tables.push_back(std::move(cells));

    std::vector<LineSeries> series(2);
    series[0].name = "max |V_s|";
    series[0].points = r.max_vs;
    series[1].name = "fit";
    for (auto [n, m] : r.max_vs)
        series[1].points.emplace_back(n, r.fit.beta * std::pow(n, r.fit.alpha));
    rep.charts.push_back(
        {"growth", svg_loglog(series, "max |V_s| growth", "n", "max |V_s|")});
    return rep;
}

// ---------------------------------------------------------------------------
// determinism

DeterminismResult run_determinism_check(const DeterminismParams& params) {
    DeterminismResult result;
    result.params = params;

    std::vector<FpArray> arrays;
    arrays.reserve(params.arrays);
    for (std::size_t a = 0; a < params.arrays; ++a)
        arrays.push_back(params.dist.make(
            {params.algorithm, derive_seed(params.seed, a)}, params.n));

    const KernelGeometry g = KernelGeometry::for_size(params.n, params.n_t);
    const std::vector<Variant> det_variants{
        Variant::RecursiveSerial, Variant::PairwiseSerial, Variant::KahanSerial,
        Variant::OrderedChunk,    Variant::TPRC,           Variant::SPS,
        Variant::SPSRC};

    // unique bit patterns per (variant, array), across runs AND pool sizes
    std::vector<std::vector<std::unordered_set<std::uint64_t>>> unique(
        det_variants.size(),
        std::vector<std::unordered_set<std::uint64_t>>(params.arrays));

    result.spsrc_equals_sps_single_block = true;
    for (std::size_t tc : params.thread_counts) {
        ThreadPool pool(tc);
        ReductionEngine engine(pool);
        for (std::size_t vi = 0; vi < det_variants.size(); ++vi) {
            ReductionPlan plan{det_variants[vi], g};
            for (std::size_t a = 0; a < params.arrays; ++a)
                for (std::size_t run = 0; run < params.runs; ++run)
                    unique[vi][a].insert(std::bit_cast<std::uint64_t>(
                        engine.reduce(arrays[a], plan).value));
        }
        // Single-block coincidence: SPSRC and SPS collapse to the same bits.
        KernelGeometry one_block{params.n_t, 1};
        for (std::size_t a = 0; a < std::min<std::size_t>(params.arrays, 8); ++a) {
            double sps = engine.reduce(arrays[a], {Variant::SPS, one_block}).value;
            double spsrc = engine.reduce(arrays[a], {Variant::SPSRC, one_block}).value;
            if (!bits_equal(sps, spsrc)) result.spsrc_equals_sps_single_block = false;
        }
    }

    result.deterministic_pass = true;
    for (std::size_t vi = 0; vi < det_variants.size(); ++vi) {
        DeterminismVariantReport vr;
        vr.variant = det_variants[vi];
        for (const auto& set : unique[vi]) {
            vr.max_unique = std::max(vr.max_unique, set.size());
            vr.total_unique += set.size();
        }
        if (vr.max_unique != 1) result.deterministic_pass = false;
        result.variants.push_back(vr);
    }

    if (params.include_nondet) {
        ThreadPool pool(params.thread_counts.back());
        ReductionEngine engine(pool);
        for (Variant v : {Variant::SPSA, Variant::AO})
            for (Backend b : {Backend::SeededReplay, Backend::LiveAtomic}) {
                DeterminismVariantReport vr;
                vr.variant = v;
                vr.backend = b;
                std::size_t narrays = std::min<std::size_t>(params.arrays, 4);
                for (std::size_t a = 0; a < narrays; ++a) {
                    std::unordered_set<std::uint64_t> seen;
                    for (std::size_t run = 0; run < params.nondet_runs; ++run) {
                        ReductionPlan plan{v, g, b, derive_seed(params.seed, run)};
                        seen.insert(std::bit_cast<std::uint64_t>(
                            engine.reduce(arrays[a], plan).value));
                    }
                    vr.max_unique = std::max(vr.max_unique, seen.size());
                    vr.total_unique += seen.size();
                }
                result.variants.push_back(vr);
            }
    }
    return result;
}

ExperimentReport to_report(const DeterminismResult& r) {
    ExperimentReport rep;
    rep.kind = "determinism";
    rep.doc = report_skeleton(rep.kind);
    rep.doc["spec"] = {{"arrays", r.params.arrays},
                       {"n", r.params.n},
                       {"runs", r.params.runs},
                       {"thread_counts", r.params.thread_counts},
                       {"n_t", r.params.n_t},
                       {"dist", dist_json(r.params.dist)},
                       {"seed", r.params.seed}};
    rep.doc["pass"] = r.deterministic_pass;
    rep.doc["spsrc_equals_sps_single_block"] = r.spsrc_equals_sps_single_block;

    ExperimentReport::Table t;
    t.name = "variants";
    t.columns = {"variant", "backend", "max_unique", "total_unique"};
    auto& variants = rep.doc["variants"];
    for (const auto& vr : r.variants) {
        t.rows.push_back(row_strings({to_string(vr.variant), to_string(vr.backend),
                                      std::to_string(vr.max_unique),
                                      std::to_string(vr.total_unique)}));
        variants.push_back({{"variant", to_string(vr.variant)},
                            {"backend", to_string(vr.backend)},
                            {"max_unique", vr.max_unique},
                            {"total_unique", vr.total_unique}});
    }
    rep.tables.push_back(std::move(t));
    return rep;
}

// ---------------------------------------------------------------------------
// bench

BenchResult run_bench(const BenchParams& params, ThreadPool& pool) {
    BenchResult result;
    result.params = params;
    FpArray x = params.dist.make({params.algorithm, params.seed}, params.n);
    ReductionEngine engine(pool);

    using clock = std::chrono::steady_clock;
    for (Variant v : params.variants) {
        ReductionPlan plan{v, KernelGeometry::for_size(params.n, params.n_t)};
        if (!is_deterministic(v)) plan.backend = Backend::LiveAtomic;

        TimingRecord rec;
        rec.variant = v;
        rec.backend = plan.backend;
        rec.geometry = plan.geometry;
        rec.repetitions = params.trials * params.sums_per_trial;

        engine.reduce(x, plan);  // warm-up, discarded
        std::vector<double> times(params.trials);
        for (std::size_t t = 0; t < params.trials; ++t) {
            auto t0 = clock::now();
            for (std::size_t s = 0; s < params.sums_per_trial; ++s)
                rec.check_value = engine.reduce(x, plan).value;
            auto t1 = clock::now();
            times[t] = std::chrono::duration<double>(t1 - t0).count() /
                       static_cast<double>(params.sums_per_trial);
        }
        rec.mean_seconds = std::accumulate(times.begin(), times.end(), 0.0) /
                           static_cast<double>(times.size());
        double ss = 0.0;
        for (double t : times) ss += (t - rec.mean_seconds) * (t - rec.mean_seconds);
        rec.std_seconds = times.size() > 1
                              ? std::sqrt(ss / static_cast<double>(times.size() - 1))
                              : 0.0;
        result.records.push_back(rec);
    }

    double t_min = 1e300;
    for (const auto& rec : result.records) t_min = std::min(t_min, rec.mean_seconds);
    for (auto& rec : result.records)
        rec.penalty = 100.0 * (t_min / rec.mean_seconds - 1.0);
    return result;
}

ExperimentReport to_report(const BenchResult& r) {
    ExperimentReport rep;
    rep.kind = "bench";
    rep.doc = report_skeleton(rep.kind);
    std::vector<std::string> names;
    for (Variant v : r.params.variants) names.push_back(to_string(v));
    rep.doc["spec"] = {{"n", r.params.n},
                       {"sums_per_trial", r.params.sums_per_trial},
                       {"trials", r.params.trials},
                       {"n_t", r.params.n_t},
                       {"variants", names},
                       {"seed", r.params.seed}};

    ExperimentReport::Table t;
    t.name = "timings";
    t.columns = {"variant",      "backend",     "n_t", "n_b", "repetitions",
                 "mean_seconds", "std_seconds", "p_s", "check_value"};
    auto& records = rep.doc["records"];
    for (const auto& rec : r.records) {
        t.rows.push_back(row_strings(
            {to_string(rec.variant), to_string(rec.backend),
             std::to_string(rec.geometry.n_t), std::to_string(rec.geometry.n_b),
             std::to_string(rec.repetitions), format_double(rec.mean_seconds),
             format_double(rec.std_seconds), format_double(rec.penalty),
             format_double(rec.check_value)}));
        records.push_back({{"variant", to_string(rec.variant)},
                           {"backend", to_string(rec.backend)},
                           {"mean_seconds", rec.mean_seconds},
                           {"std_seconds", rec.std_seconds},
                           {"p_s", rec.penalty}});
    }
    rep.tables.push_back(std::move(t));
    return rep;
}

// ---------------------------------------------------------------------------
// ops sweep

OpSweepResult run_op_sweep(const OpSweepParams& params, ThreadPool& pool) {
    for (double r : params.ratios)
        if (!(r > 0.0) || r > 1.0)
            throw std::invalid_argument("op_sweep: ratios must lie in (0, 1]");
    OpSweepResult result;
    result.params = params;
    result.cells.resize(params.dims.size() * params.ratios.size());

    auto run_cell = [&](std::size_t ci, ThreadPool* live_pool) {
        std::size_t di = ci / params.ratios.size();
        std::size_t ri = ci % params.ratios.size();
        TensorOpSpec spec;
        spec.op = params.op;
        spec.input_extent = params.dims[di];
        spec.reduction_ratio = params.ratios[ri];
        spec.cols = params.op == TensorOp::IndexAdd
                        ? (params.cols == 0 ? params.dims[di] : params.cols)
                        : 1;
        spec.mode = params.mode;
        spec.data_seed = derive_seed(params.seed, ci * 3 + 1);
        spec.index_seed = derive_seed(params.seed, ci * 3 + 2);
        spec.schedule_seed = derive_seed(params.seed, ci * 3 + 3);

        UniqueCountResult u = unique_output_count(spec, params.runs, live_pool);
        OpSweepCell cell;
        cell.dim = spec.input_extent;
        cell.ratio = spec.reduction_ratio;
        cell.out_extent = spec.out_extent();
        cell.unique_outputs = u.unique_outputs;
        cell.mean_v_c = u.mean_v_c;
        cell.mean_v_ermv = u.mean_v_ermv;
        result.cells[ci] = cell;
    };

    if (params.mode == ExecMode::NondetLive) {
        // Live cells need the pool inside the op; run cells serially.
        for (std::size_t ci = 0; ci < result.cells.size(); ++ci) run_cell(ci, &pool);
    } else {
        pool.parallel_for(result.cells.size(),
                          [&](std::size_t ci) { run_cell(ci, nullptr); });
    }
    return result;
}

ExperimentReport to_report(const OpSweepResult& r) {
    ExperimentReport rep;
    rep.kind = "ops";
    rep.doc = report_skeleton(rep.kind);
    rep.doc["spec"] = {{"op", to_string(r.params.op)},
                       {"dims", r.params.dims},
                       {"ratios", r.params.ratios},
                       {"runs", r.params.runs},
                       {"cols", r.params.cols},
                       {"mode", to_string(r.params.mode)},
                       {"seed", r.params.seed}};

    ExperimentReport::Table t;
    t.name = "cells";
    t.columns = {"dim", "ratio", "out_extent", "unique_outputs", "mean_v_c",
                 "mean_v_ermv"};
    auto& cells = rep.doc["cells"];
    for (const auto& c : r.cells) {
        t.rows.push_back(row_strings(
            {std::to_string(c.dim), format_double(c.ratio), std::to_string(c.out_extent),
             std::to_string(c.unique_outputs), format_double(c.mean_v_c),
             format_double(c.mean_v_ermv)}));
        cells.push_back({{"dim", c.dim},
                         {"ratio", c.ratio},
                         {"out_extent", c.out_extent},
                         {"unique_outputs", c.unique_outputs},
                         {"mean_v_c", c.mean_v_c},
                         {"mean_v_ermv", c.mean_v_ermv}});
    }
    rep.tables.push_back(std::move(t));

    // Heatmaps: rows = dims, cols = ratios.
    std::vector<std::string> row_labels, col_labels;
    for (std::size_t d : r.params.dims) row_labels.push_back(std::to_string(d));
    for (double ratio : r.params.ratios) col_labels.push_back(format_double(ratio));
    auto grid_of = [&](auto getter) {
        std::vector<std::vector<double>> g(r.params.dims.size(),
                                           std::vector<double>(r.params.ratios.size()));
        for (std::size_t ci = 0; ci < r.cells.size(); ++ci)
            g[ci / r.params.ratios.size()][ci % r.params.ratios.size()] =
                getter(r.cells[ci]);
        return g;
    };
    rep.charts.push_back(
        {"unique", svg_heatmap(row_labels, col_labels,
                               grid_of([](const OpSweepCell& c) {
                                   return static_cast<double>(c.unique_outputs);
                               }),
                               "unique outputs per cell, " + to_string(r.params.op))});
    rep.charts.push_back(
        {"vc", svg_heatmap(row_labels, col_labels,
                           grid_of([](const OpSweepCell& c) { return c.mean_v_c; }),
                           "mean V_c per cell, " + to_string(r.params.op))});
    return rep;
}

// ---------------------------------------------------------------------------
// gnn demo

namespace {

struct GnnModel {
    Graph graph;
    Tensor w1_self, w1_agg;  // f x h
    Tensor w2_self, w2_agg;  // h x h
};

Tensor random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    FpArray v = FpArray::uniform({RngAlgorithm::Mt19937_64, seed}, rows * cols, -1.0, 1.0);
    return Tensor{{rows, cols}, {v.values().begin(), v.values().end()}};
}

GnnModel build_model(const GnnDemoParams& p) {
    GnnModel m;
    m.graph.num_nodes = p.num_nodes;
    Rng er({RngAlgorithm::Mt19937_64, derive_seed(p.seed, 1)});
    m.graph.edges.reserve(p.num_edges);
    for (std::size_t e = 0; e < p.num_edges; ++e)
        m.graph.edges.emplace_back(
            static_cast<std::uint32_t>(er.next_below(p.num_nodes)),
            static_cast<std::uint32_t>(er.next_below(p.num_nodes)));
    m.graph.features = random_matrix(p.num_nodes, p.feature_dim, derive_seed(p.seed, 2));
    m.w1_self = random_matrix(p.feature_dim, p.hidden_dim, derive_seed(p.seed, 3));
    m.w1_agg = random_matrix(p.feature_dim, p.hidden_dim, derive_seed(p.seed, 4));
    m.w2_self = random_matrix(p.hidden_dim, p.hidden_dim, derive_seed(p.seed, 5));
    m.w2_agg = random_matrix(p.hidden_dim, p.hidden_dim, derive_seed(p.seed, 6));
    return m;
}

Tensor forward_two_layers(const GnnModel& m, ExecMode mode, std::uint64_t run_seed) {
    Exec e1{mode, derive_seed(run_seed, 1), nullptr};
    Tensor h1 = sage_forward(m.graph, m.w1_self, m.w1_agg, e1);
    Graph g2 = m.graph;
    g2.features = std::move(h1);
    Exec e2{mode, derive_seed(run_seed, 2), nullptr};
    return sage_forward(g2, m.w2_self, m.w2_agg, e2);
}

}  // namespace

GnnDemoResult run_gnn_demo(const GnnDemoParams& params, ThreadPool& pool) {
    GnnDemoResult result;
    result.params = params;
    GnnModel model = build_model(params);

    Tensor reference = forward_two_layers(model, ExecMode::DeterministicSerial, 0);

    // Deterministic mode repeated: must reproduce the reference bitwise.
    for (std::size_t run = 0; run < params.runs; ++run) {
        Tensor out = forward_two_layers(model, ExecMode::DeterministicSerial,
                                        derive_seed(params.seed, 100 + run));
        result.det_max_v_c = std::max(result.det_max_v_c, v_c(reference.data, out.data));
        result.det_max_v_ermv =
            std::max(result.det_max_v_ermv, v_ermv(reference.data, out.data).value);
    }

    // Replay mode: distinct seeds per run.
    std::vector<Tensor> outputs(params.runs);
    pool.parallel_for(params.runs, [&](std::size_t run) {
        outputs[run] = forward_two_layers(model, ExecMode::NondetReplay,
                                          derive_seed(params.seed, 1000 + run));
    });
    double vc_acc = 0.0, ermv_acc = 0.0;
    std::unordered_map<std::string, std::size_t> byte_counts;
    for (const auto& out : outputs) {
        vc_acc += v_c(reference.data, out.data);
        ermv_acc += v_ermv(reference.data, out.data).value;
        ++byte_counts[canonical_bytes(out)];
    }
    result.replay_mean_v_c = vc_acc / static_cast<double>(params.runs);
    result.replay_mean_v_ermv = ermv_acc / static_cast<double>(params.runs);

    // v_c > 0 between a run pair iff the canonical encodings differ.
    double identical_pairs = 0.0;
    for (const auto& [bytes, count] : byte_counts)
        identical_pairs += 0.5 * static_cast<double>(count) *
                           static_cast<double>(count - 1);
    double total_pairs =
        0.5 * static_cast<double>(params.runs) * static_cast<double>(params.runs - 1);
    result.replay_pair_fraction_differing =
        total_pairs == 0.0 ? 0.0 : 1.0 - identical_pairs / total_pairs;
    return result;
}

ExperimentReport to_report(const GnnDemoResult& r) {
    ExperimentReport rep;
    rep.kind = "gnn";
    rep.doc = report_skeleton(rep.kind);
    rep.doc["spec"] = {{"num_nodes", r.params.num_nodes},
                       {"num_edges", r.params.num_edges},
                       {"feature_dim", r.params.feature_dim},
                       {"hidden_dim", r.params.hidden_dim},
                       {"runs", r.params.runs},
                       {"seed", r.params.seed}};
    rep.doc["deterministic"] = {{"max_v_c", r.det_max_v_c},
                                {"max_v_ermv", r.det_max_v_ermv}};
    rep.doc["replay"] = {{"mean_v_c", r.replay_mean_v_c},
                         {"mean_v_ermv", r.replay_mean_v_ermv},
                         {"pair_fraction_differing", r.replay_pair_fraction_differing}};

    ExperimentReport::Table t;
    t.name = "modes";
    t.columns = {"mode", "v_ermv", "v_c"};
    t.rows.push_back(row_strings({"deterministic", format_double(r.det_max_v_ermv),
                                  format_double(r.det_max_v_c)}));
    t.rows.push_back(row_strings({"replay", format_double(r.replay_mean_v_ermv),
                                  format_double(r.replay_mean_v_c)}));
    rep.tables.push_back(std::move(t));
    return rep;
}

}  // namespace fpna
