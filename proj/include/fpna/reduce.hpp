#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpna/fp_array.hpp"
#include "fpna/thread_pool.hpp"

namespace fpna {

// Summation variants. The serial trio run on one thread; the blocked variants
// map the GPU-style (threads-per-block x blocks) geometry onto the worker
// pool; SPSA and AO are nondeterministic by construction.
enum class Variant {
    RecursiveSerial,
    PairwiseSerial,
    KahanSerial,
    OrderedChunk,
    TPRC,   // two-pass: block partials reduced serially in block order
    SPS,    // single-pass: last block tree-reduces the partials
    SPSRC,  // single-pass: last block serially reduces the partials
    SPSA,   // block partials committed to the accumulator in unspecified order
    AO      // every element committed to the accumulator in unspecified order
};

enum class Backend { LiveAtomic, SeededReplay };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

bool is_deterministic(Variant v);

struct KernelGeometry {
    std::size_t n_t = 64;  // threads per block, must be a power of two
    std::size_t n_b = 1;   // number of blocks

    bool valid() const {
        return n_t >= 1 && n_b >= 1 && (n_t & (n_t - 1)) == 0;
    }
    // n_b sized so one grid pass covers n elements (grid-stride handles more).
    static KernelGeometry for_size(std::size_t n, std::size_t n_t = 64);
};

struct ReductionPlan {
    Variant variant = Variant::RecursiveSerial;
    KernelGeometry geometry{};
    Backend backend = Backend::SeededReplay;
    std::uint64_t schedule_seed = 0;  // ignored by deterministic variants
};

struct SumResult {
    double value = 0.0;
    Variant variant = Variant::RecursiveSerial;
    // Per-block partial sums; absent for serial variants and for LiveAtomic
    // nondeterministic runs (there is no defined final-stage order to replay).
    std::optional<std::vector<double>> block_partials;
    // Commit order of the replay backend: partial indices for SPSA, element
    // indices for AO.
    std::optional<std::vector<std::uint32_t>> commit_order;
};

// Serial reference algorithms.
double recursive_sum(std::span<const double> x);
double pairwise_sum(std::span<const double> x);
double kahan_sum(std::span<const double> x);

double recursive_sum(const FpArray& x);
double pairwise_sum(const FpArray& x);
double kahan_sum(const FpArray& x);

// A-priori ceiling for |S_d - S_nd|: N * u * sum(|x_i|), u = 2^-53.
double error_bound(std::span<const double> x);
double error_bound(const FpArray& x);

// Lock-free binary64 add emulating GPU atomicAdd: CAS loop over the 64-bit
// bit pattern; each add lands exactly once, global order unspecified.
void atomic_f64_add(std::atomic<std::uint64_t>& cell, double v);

class ReductionEngine {
public:
    explicit ReductionEngine(ThreadPool& pool) : pool_(pool) {}

    // Per-block partials with the halving-offset tree; lanes beyond n
    // contribute 0.0, lanes below grid-stride pre-accumulate serially.
    std::vector<double> block_reduce(std::span<const double> x, KernelGeometry g) const;

    SumResult reduce(const FpArray& x, const ReductionPlan& plan) const;
    SumResult reduce(std::span<const double> x, const ReductionPlan& plan) const;

    ThreadPool& pool() const { return pool_; }

private:
    ThreadPool& pool_;
};

}  // namespace fpna
