#include "fpna/tensor.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "fpna/fp_array.hpp"
#include "fpna/metrics.hpp"
#include "fpna/rng.hpp"

namespace fpna {

namespace {

constexpr char kTensorMagic[8] = {'F', 'P', 'N', 'T', '0', '0', '0', '1'};

void atomic_bits_add(std::uint64_t& cell, double v) {
    std::atomic_ref<std::uint64_t> ref(cell);
    std::uint64_t expected = ref.load(std::memory_order_relaxed);
    for (;;) {
        double updated = std::bit_cast<double>(expected) + v;
        if (ref.compare_exchange_weak(expected, std::bit_cast<std::uint64_t>(updated),
                                      std::memory_order_relaxed))
            return;
    }
}

std::vector<std::uint32_t> commit_order(std::size_t count, const Exec& exec) {
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    if (exec.mode == ExecMode::NondetReplay) shuffle_indices(order, exec.seed);
    return order;
}

ThreadPool& require_pool(const Exec& exec) {
    if (exec.pool == nullptr)
        throw std::invalid_argument("NondetLive execution requires a thread pool");
    return *exec.pool;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> dims) {
    if (dims.empty() || dims.size() > 2)
        throw std::invalid_argument("Tensor: rank must be 1 or 2");
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    Tensor t;
    t.dims = std::move(dims);
    t.data.assign(total, 0.0);
    return t;
}

void IndexArray::validate() const {
    for (std::uint32_t idx : indices)
        if (idx >= target_extent)
            throw std::out_of_range("IndexArray: index beyond target extent");
}

std::string to_string(ExecMode m) {
    switch (m) {
        case ExecMode::DeterministicSerial: return "deterministic_serial";
        case ExecMode::NondetReplay: return "nondet_replay";
        case ExecMode::NondetLive: return "nondet_live";
    }
    return "?";
}

ExecMode exec_mode_from_string(const std::string& s) {
    if (s == "deterministic_serial") return ExecMode::DeterministicSerial;
    if (s == "nondet_replay") return ExecMode::NondetReplay;
    if (s == "nondet_live") return ExecMode::NondetLive;
    throw std::invalid_argument("unknown exec mode: " + s);
}

std::string to_string(TensorOp op) {
    switch (op) {
        case TensorOp::ScatterReduceSum: return "scatter_reduce_sum";
        case TensorOp::ScatterReduceMean: return "scatter_reduce_mean";
        case TensorOp::IndexAdd: return "index_add";
    }
    return "?";
}

TensorOp tensor_op_from_string(const std::string& s) {
    if (s == "scatter_reduce_sum") return TensorOp::ScatterReduceSum;
    if (s == "scatter_reduce_mean") return TensorOp::ScatterReduceMean;
    if (s == "index_add") return TensorOp::IndexAdd;
    throw std::invalid_argument("unknown tensor op: " + s);
}

std::size_t out_extent_for_ratio(std::size_t input_extent, double ratio) {
    if (!(ratio > 0.0) || ratio > 1.0)
        throw std::invalid_argument("reduction ratio must lie in (0, 1]");
    auto out = static_cast<std::size_t>(
        std::llround(static_cast<double>(input_extent) * (1.0 - ratio)));
    return std::max<std::size_t>(out, 1);
}

Tensor scatter_reduce(const Tensor& x, const IndexArray& i, std::size_t out_extent,
                      ScatterKind kind, const Exec& exec) {
    if (x.rank() != 1) throw std::invalid_argument("scatter_reduce: x must be rank 1");
    if (i.indices.size() != x.size())
        throw std::invalid_argument("scatter_reduce: index/input length mismatch");
    if (i.target_extent != out_extent)
        throw std::invalid_argument("scatter_reduce: index extent != out extent");
    i.validate();

    Tensor y = Tensor::zeros({out_extent});
    std::vector<std::uint64_t> counts(out_extent, 0);

    if (exec.mode == ExecMode::NondetLive) {
        ThreadPool& pool = require_pool(exec);
        std::vector<std::uint64_t> bits(out_extent, 0);
        constexpr std::size_t kChunk = 512;
        const std::size_t chunks = (x.size() + kChunk - 1) / kChunk;
        pool.parallel_for(chunks, [&](std::size_t c) {
            std::size_t lo = c * kChunk;
            std::size_t hi = std::min(lo + kChunk, x.size());
            for (std::size_t j = lo; j < hi; ++j) {
                atomic_bits_add(bits[i.indices[j]], x.data[j]);
                std::atomic_ref<std::uint64_t>(counts[i.indices[j]])
                    .fetch_add(1, std::memory_order_relaxed);
            }
        });
        for (std::size_t k = 0; k < out_extent; ++k)
            y.data[k] = std::bit_cast<double>(bits[k]);
    } else {
        for (std::uint32_t j : commit_order(x.size(), exec)) {
            y.data[i.indices[j]] += x.data[j];
            ++counts[i.indices[j]];
        }
    }

    if (kind == ScatterKind::Mean)
        for (std::size_t k = 0; k < out_extent; ++k)
            y.data[k] /= static_cast<double>(std::max<std::uint64_t>(counts[k], 1));
    return y;
}

void index_add(Tensor& y, const Tensor& x, const IndexArray& i, const Exec& exec) {
    if (y.rank() != 2 || x.rank() != 2)
        throw std::invalid_argument("index_add: y and x must be rank 2");
    if (x.rows() != i.indices.size())
        throw std::invalid_argument("index_add: index/input row mismatch");
    if (x.cols() != y.cols())
        throw std::invalid_argument("index_add: column count mismatch");
    if (i.target_extent != y.rows())
        throw std::invalid_argument("index_add: index extent != target rows");
    i.validate();

    const std::size_t cols = y.cols();
    if (exec.mode == ExecMode::NondetLive) {
        ThreadPool& pool = require_pool(exec);
        std::vector<std::uint64_t> bits(y.data.size());
        for (std::size_t e = 0; e < bits.size(); ++e)
            bits[e] = std::bit_cast<std::uint64_t>(y.data[e]);
        pool.parallel_for(x.rows(), [&](std::size_t k) {
            std::size_t row = i.indices[k];
            for (std::size_t j = 0; j < cols; ++j)
                atomic_bits_add(bits[row * cols + j], x.at(k, j));
        });
        for (std::size_t e = 0; e < bits.size(); ++e)
            y.data[e] = std::bit_cast<double>(bits[e]);
    } else {
        for (std::uint32_t k : commit_order(x.rows(), exec)) {
            std::size_t row = i.indices[k];
            for (std::size_t j = 0; j < cols; ++j) y.at(row, j) += x.at(k, j);
        }
    }
}

std::string canonical_bytes(const Tensor& t) {
    static_assert(std::endian::native == std::endian::little);
    return std::string(reinterpret_cast<const char*>(t.data.data()),
                       t.data.size() * sizeof(double));
}

namespace {

struct OpInstance {
    Tensor x;
    IndexArray idx;
    std::size_t out_extent = 0;
};

OpInstance build_instance(const TensorOpSpec& spec) {
    OpInstance inst;
    inst.out_extent = spec.out_extent();
    std::size_t rows = spec.input_extent;
    std::size_t cols = spec.op == TensorOp::IndexAdd ? spec.cols : 1;

    FpArray data = FpArray::uniform({RngAlgorithm::Mt19937_64, spec.data_seed},
                                    rows * cols, 1.0, 10.0);
    if (spec.op == TensorOp::IndexAdd)
        inst.x = Tensor{{rows, cols}, {data.values().begin(), data.values().end()}};
    else
        inst.x = Tensor{{rows}, {data.values().begin(), data.values().end()}};

    Rng ir({RngAlgorithm::Mt19937_64, spec.index_seed});
    inst.idx.target_extent = inst.out_extent;
    inst.idx.indices.resize(rows);
    for (auto& v : inst.idx.indices)
        v = static_cast<std::uint32_t>(ir.next_below(inst.out_extent));
    return inst;
}

Tensor run_instance(const TensorOpSpec& spec, const OpInstance& inst, const Exec& exec) {
    switch (spec.op) {
        case TensorOp::ScatterReduceSum:
            return scatter_reduce(inst.x, inst.idx, inst.out_extent, ScatterKind::Sum, exec);
        case TensorOp::ScatterReduceMean:
            return scatter_reduce(inst.x, inst.idx, inst.out_extent, ScatterKind::Mean, exec);
        case TensorOp::IndexAdd: {
            Tensor y = Tensor::zeros({inst.out_extent, spec.cols});
            index_add(y, inst.x, inst.idx, exec);
            return y;
        }
    }
    throw std::logic_error("unreachable op");
}

}  // namespace

UniqueCountResult unique_output_count(const TensorOpSpec& spec, std::size_t runs,
                                      ThreadPool* pool) {
    if (runs < 2) throw std::invalid_argument("unique_output_count: runs must be >= 2");
    OpInstance inst = build_instance(spec);
    Tensor reference =
        run_instance(spec, inst, Exec{ExecMode::DeterministicSerial, 0, nullptr});

    UniqueCountResult result;
    std::unordered_set<std::string> seen;
    double vc_acc = 0.0, ermv_acc = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
        Exec exec{spec.mode, derive_seed(spec.schedule_seed, r), pool};
        Tensor out = run_instance(spec, inst, exec);
        seen.insert(canonical_bytes(out));
        vc_acc += v_c(reference.data, out.data);
        ermv_acc += v_ermv(reference.data, out.data).value;
    }
    result.unique_outputs = seen.size();
    result.mean_v_c = vc_acc / static_cast<double>(runs);
    result.mean_v_ermv = ermv_acc / static_cast<double>(runs);
    return result;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows())
        throw std::invalid_argument("matmul: incompatible shapes");
    Tensor c = Tensor::zeros({a.rows(), b.cols()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a.at(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

Tensor sage_forward(const Graph& g, const Tensor& w_self, const Tensor& w_agg,
                    const Exec& exec) {
    const std::size_t f = g.features.cols();
    if (g.features.rows() != g.num_nodes)
        throw std::invalid_argument("sage_forward: feature rows != num_nodes");
    if (w_self.rows() != f || w_agg.rows() != f || w_self.cols() != w_agg.cols())
        throw std::invalid_argument("sage_forward: weight shape mismatch");
    for (auto [src, dst] : g.edges)
        if (src >= g.num_nodes || dst >= g.num_nodes)
            throw std::out_of_range("sage_forward: edge endpoint out of range");

    // Gather source features per edge, then index_add them onto destinations.
    Tensor messages = Tensor::zeros({g.edges.size(), f});
    Tensor ones = Tensor::zeros({g.edges.size(), f});
    IndexArray dst_idx;
    dst_idx.target_extent = g.num_nodes;
    dst_idx.indices.resize(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [src, dst] = g.edges[e];
        dst_idx.indices[e] = dst;
        for (std::size_t j = 0; j < f; ++j) {
            messages.at(e, j) = g.features.at(src, j);
            ones.at(e, j) = 1.0;
        }
    }

    Tensor agg = Tensor::zeros({g.num_nodes, f});
    Tensor count = Tensor::zeros({g.num_nodes, f});
    if (!g.edges.empty()) {
        index_add(agg, messages, dst_idx, exec);
        // The count accumulation is order-insensitive (exact integers) but
        // routed through the same op to keep the dataflow faithful.
        index_add(count, ones, dst_idx, exec);
    }
    for (std::size_t e = 0; e < agg.data.size(); ++e)
        agg.data[e] /= std::max(count.data[e], 1.0);

    Tensor out = matmul(agg, w_agg);
    Tensor self = matmul(g.features, w_self);
    for (std::size_t e = 0; e < out.data.size(); ++e) out.data[e] += self.data[e];

    // L2-normalize each row.
    const std::size_t oc = out.cols();
    for (std::size_t r = 0; r < out.rows(); ++r) {
        double ss = 0.0;
        for (std::size_t j = 0; j < oc; ++j) ss += out.at(r, j) * out.at(r, j);
        double norm = std::sqrt(ss);
        if (norm > 0.0)
            for (std::size_t j = 0; j < oc; ++j) out.at(r, j) /= norm;
    }
    return out;
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
    static_assert(std::endian::native == std::endian::little);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(kTensorMagic, sizeof(kTensorMagic));
    std::uint64_t rank = t.dims.size();
    out.write(reinterpret_cast<const char*>(&rank), sizeof(rank));
    for (std::size_t d : t.dims) {
        std::uint64_t e = d;
        out.write(reinterpret_cast<const char*>(&e), sizeof(e));
    }
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Tensor read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kTensorMagic, sizeof(magic)) != 0)
        throw std::runtime_error("bad FPNT0001 magic: " + path.string());
    std::uint64_t rank = 0;
    in.read(reinterpret_cast<char*>(&rank), sizeof(rank));
    if (!in || rank == 0 || rank > 2)
        throw std::runtime_error("bad tensor rank: " + path.string());
    std::vector<std::size_t> dims(rank);
    std::size_t total = 1;
    for (auto& d : dims) {
        std::uint64_t e = 0;
        in.read(reinterpret_cast<char*>(&e), sizeof(e));
        d = e;
        total *= d;
    }
    Tensor t;
    t.dims = std::move(dims);
    t.data.resize(total);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw std::runtime_error("truncated tensor file: " + path.string());
    return t;
}

}  // namespace fpna
