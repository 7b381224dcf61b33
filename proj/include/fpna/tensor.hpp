#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpna/thread_pool.hpp"

namespace fpna {

// Row-major rank-1 or rank-2 tensor of binary64 values.
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<double> data;

    static Tensor zeros(std::vector<std::size_t> dims);

    std::size_t rank() const { return dims.size(); }
    std::size_t size() const { return data.size(); }
    std::size_t rows() const { return dims.at(0); }
    std::size_t cols() const { return rank() == 2 ? dims.at(1) : 1; }

    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
};

struct IndexArray {
    std::vector<std::uint32_t> indices;
    std::size_t target_extent = 0;

    void validate() const;  // every index < target_extent
};

enum class ExecMode { DeterministicSerial, NondetReplay, NondetLive };

std::string to_string(ExecMode m);
ExecMode exec_mode_from_string(const std::string& s);

struct Exec {
    ExecMode mode = ExecMode::DeterministicSerial;
    std::uint64_t seed = 0;       // replay commit-order seed
    ThreadPool* pool = nullptr;   // required for NondetLive
};

enum class ScatterKind { Sum, Mean };

// Y[k] = reduction over {X[j] : I[j] = k}. DeterministicSerial commits j in
// ascending order, NondetReplay in a seeded permutation, NondetLive through
// concurrent atomic accumulation. Mean divides by the bucket count clamped
// to a minimum of 1 (empty buckets stay 0).
Tensor scatter_reduce(const Tensor& x, const IndexArray& i, std::size_t out_extent,
                      ScatterKind kind, const Exec& exec);

// Y[I[k], j] += X[k, j]; row commit order follows the exec mode, columns are
// always walked in ascending order.
void index_add(Tensor& y, const Tensor& x, const IndexArray& i, const Exec& exec);

enum class TensorOp { ScatterReduceSum, ScatterReduceMean, IndexAdd };

std::string to_string(TensorOp op);
TensorOp tensor_op_from_string(const std::string& s);

// Reduction-ratio knob for the sweep experiments: R = 1 collapses the whole
// input onto a single output cell (recovering the plain sum) and R -> 0
// spreads it over (almost) as many cells as inputs.
std::size_t out_extent_for_ratio(std::size_t input_extent, double ratio);

struct TensorOpSpec {
    TensorOp op = TensorOp::ScatterReduceSum;
    std::size_t input_extent = 0;
    double reduction_ratio = 0.5;     // in (0, 1]
    std::size_t cols = 1;             // row width for index_add inputs
    ExecMode mode = ExecMode::NondetReplay;
    std::uint64_t data_seed = 1;
    std::uint64_t index_seed = 2;
    std::uint64_t schedule_seed = 3;  // base seed; run r uses a derived child

    std::size_t out_extent() const {
        return out_extent_for_ratio(input_extent, reduction_ratio);
    }
};

struct UniqueCountResult {
    std::size_t unique_outputs = 0;
    double mean_v_c = 0.0;     // mean v_c of each run against the serial reference
    double mean_v_ermv = 0.0;
};

// Executes the op `runs` times (distinct derived seeds under NondetReplay),
// counts bitwise-distinct outputs via their canonical little-endian byte
// image, and compares each run against the deterministic serial reference.
UniqueCountResult unique_output_count(const TensorOpSpec& spec, std::size_t runs,
                                      ThreadPool* pool = nullptr);

// Canonical byte encoding of the row-major data (little-endian f64).
std::string canonical_bytes(const Tensor& t);

struct Graph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (src, dst)
    Tensor features;  // num_nodes x f
};

// Mean-aggregating graph convolution: neighbor features are index_add-ed per
// destination node (counts clamped to >= 1), passed through two linear maps
// (out = agg * w_agg + h * w_self), then L2-normalized per row. The only
// nondeterminism source is index_add's exec mode.
Tensor sage_forward(const Graph& g, const Tensor& w_self, const Tensor& w_agg,
                    const Exec& exec);

// Row-major matrix product (rank-2 inputs, deterministic).
Tensor matmul(const Tensor& a, const Tensor& b);

// Tensor container: magic "FPNT0001", little-endian u64 rank, rank u64
// extents, then row-major little-endian binary64 data.
void write_tensor_file(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor_file(const std::filesystem::path& path);

}  // namespace fpna
