#include "fpna/reduce.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fpna {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::RecursiveSerial: return "recursive_serial";
        case Variant::PairwiseSerial: return "pairwise_serial";
        case Variant::KahanSerial: return "kahan_serial";
        case Variant::OrderedChunk: return "ordered_chunk";
        case Variant::TPRC: return "tprc";
        case Variant::SPS: return "sps";
        case Variant::SPSRC: return "spsrc";
        case Variant::SPSA: return "spsa";
        case Variant::AO: return "ao";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    for (Variant v : {Variant::RecursiveSerial, Variant::PairwiseSerial,
                      Variant::KahanSerial, Variant::OrderedChunk, Variant::TPRC,
                      Variant::SPS, Variant::SPSRC, Variant::SPSA, Variant::AO})
        if (to_string(v) == s) return v;
    throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(Backend b) {
    return b == Backend::LiveAtomic ? "live_atomic" : "seeded_replay";
}

Backend backend_from_string(const std::string& s) {
    if (s == "live_atomic") return Backend::LiveAtomic;
    if (s == "seeded_replay") return Backend::SeededReplay;
    throw std::invalid_argument("unknown backend: " + s);
}

bool is_deterministic(Variant v) {
    return v != Variant::SPSA && v != Variant::AO;
}

KernelGeometry KernelGeometry::for_size(std::size_t n, std::size_t n_t) {
    KernelGeometry g;
    g.n_t = n_t;
    g.n_b = n == 0 ? 1 : (n + n_t - 1) / n_t;
    return g;
}

double recursive_sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

double pairwise_sum(std::span<const double> x) {
    if (x.empty()) return 0.0;
    std::size_t m = std::bit_ceil(x.size());
    std::vector<double> buf(m, 0.0);
    std::copy(x.begin(), x.end(), buf.begin());
    for (std::size_t half = m / 2; half > 0; half /= 2)
        for (std::size_t i = 0; i < half; ++i) buf[i] += buf[i + half];
    return buf[0];
}

double kahan_sum(std::span<const double> x) {
    double s = 0.0, c = 0.0;
    for (double v : x) {
        double y = v - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

double recursive_sum(const FpArray& x) { return recursive_sum(x.values()); }
double pairwise_sum(const FpArray& x) { return pairwise_sum(x.values()); }
double kahan_sum(const FpArray& x) { return kahan_sum(x.values()); }

double error_bound(std::span<const double> x) {
    constexpr double u = 0x1.0p-53;
    double abs_sum = 0.0;
    for (double v : x) abs_sum += std::fabs(v);
    return static_cast<double>(x.size()) * u * abs_sum;
}

double error_bound(const FpArray& x) { return error_bound(x.values()); }

void atomic_f64_add(std::atomic<std::uint64_t>& cell, double v) {
    std::uint64_t expected = cell.load(std::memory_order_relaxed);
    for (;;) {
        double updated = std::bit_cast<double>(expected) + v;
        if (cell.compare_exchange_weak(expected, std::bit_cast<std::uint64_t>(updated),
                                       std::memory_order_relaxed))
            return;
        // expected was refreshed by the failed CAS; retry with the new value.
    }
}

namespace {

// Halving-offset tree over a scratch buffer of power-of-two length.
double block_tree(std::vector<double>& lanes) {
    for (std::size_t offset = lanes.size() / 2; offset > 0; offset /= 2)
        for (std::size_t t = 0; t < offset; ++t) lanes[t] += lanes[t + offset];
    return lanes[0];
}

void require_geometry(const KernelGeometry& g) {
    if (!g.valid())
        throw std::invalid_argument(
            "invalid kernel geometry: n_t must be a power of two >= 1, n_b >= 1");
}

}  // namespace

std::vector<double> ReductionEngine::block_reduce(std::span<const double> x,
                                                  KernelGeometry g) const {
    require_geometry(g);
    const std::size_t n = x.size();
    const std::size_t stride = g.n_t * g.n_b;
    std::vector<double> partials(g.n_b, 0.0);
    pool_.parallel_for(g.n_b, [&](std::size_t b) {
        std::vector<double> lanes(g.n_t, 0.0);
        for (std::size_t t = 0; t < g.n_t; ++t) {
            double acc = 0.0;
            for (std::size_t idx = b * g.n_t + t; idx < n; idx += stride)
                acc += x[idx];
            lanes[t] = acc;
        }
        partials[b] = block_tree(lanes);
    });
    return partials;
}

SumResult ReductionEngine::reduce(const FpArray& x, const ReductionPlan& plan) const {
    return reduce(x.values(), plan);
}

SumResult ReductionEngine::reduce(std::span<const double> x,
                                  const ReductionPlan& plan) const {
    require_geometry(plan.geometry);
    SumResult result;
    result.variant = plan.variant;
    if (x.empty()) return result;  // every variant: empty sum is +0.0

    const KernelGeometry g = plan.geometry;
    switch (plan.variant) {
        case Variant::RecursiveSerial:
            result.value = recursive_sum(x);
            return result;
        case Variant::PairwiseSerial:
            result.value = pairwise_sum(x);
            return result;
        case Variant::KahanSerial:
            result.value = kahan_sum(x);
            return result;
        case Variant::OrderedChunk: {
            // ceil(n / n_t)-sized contiguous chunks, serial partials, combined
            // strictly in ascending chunk order.
            const std::size_t chunk = (x.size() + g.n_t - 1) / g.n_t;
            const std::size_t chunks = (x.size() + chunk - 1) / chunk;
            std::vector<double> partials(chunks, 0.0);
            pool_.parallel_for(chunks, [&](std::size_t c) {
                std::size_t lo = c * chunk;
                std::size_t hi = std::min(lo + chunk, x.size());
                partials[c] = recursive_sum(x.subspan(lo, hi - lo));
            });
            result.value = recursive_sum(partials);
            result.block_partials = std::move(partials);
            return result;
        }
        case Variant::TPRC: {
            auto partials = block_reduce(x, g);
            result.value = recursive_sum(partials);
            result.block_partials = std::move(partials);
            return result;
        }
        case Variant::SPS: {
            auto partials = block_reduce(x, g);
            std::vector<double> lanes(std::bit_ceil(partials.size()), 0.0);
            std::copy(partials.begin(), partials.end(), lanes.begin());
            result.value = block_tree(lanes);
            result.block_partials = std::move(partials);
            return result;
        }
        case Variant::SPSRC: {
            auto partials = block_reduce(x, g);
            // Mirrors the retirement-count listing: the last block walks the
            // partials in ascending block index.
            double s = partials[0];
            for (std::size_t i = 1; i < partials.size(); ++i) s += partials[i];
            result.value = s;
            result.block_partials = std::move(partials);
            return result;
        }
        case Variant::SPSA: {
            auto partials = block_reduce(x, g);
            if (plan.backend == Backend::SeededReplay) {
                std::vector<std::uint32_t> order(partials.size());
                for (std::size_t i = 0; i < order.size(); ++i)
                    order[i] = static_cast<std::uint32_t>(i);
                shuffle_indices(order, plan.schedule_seed);
                double s = 0.0;
                for (std::uint32_t i : order) s += partials[i];
                result.value = s;
                result.block_partials = std::move(partials);
                result.commit_order = std::move(order);
            } else {
                // Each block commits its partial as it finishes.
                std::atomic<std::uint64_t> cell{0};
                pool_.parallel_for(partials.size(), [&](std::size_t b) {
                    atomic_f64_add(cell, partials[b]);
                });
                result.value = std::bit_cast<double>(cell.load());
            }
            return result;
        }
        case Variant::AO: {
            if (plan.backend == Backend::SeededReplay) {
                std::vector<std::uint32_t> order(x.size());
                for (std::size_t i = 0; i < order.size(); ++i)
                    order[i] = static_cast<std::uint32_t>(i);
                shuffle_indices(order, plan.schedule_seed);
                double s = 0.0;
                for (std::uint32_t i : order) s += x[i];
                result.value = s;
                result.commit_order = std::move(order);
            } else {
                std::atomic<std::uint64_t> cell{0};
                constexpr std::size_t kChunk = 1024;
                const std::size_t chunks = (x.size() + kChunk - 1) / kChunk;
                pool_.parallel_for(chunks, [&](std::size_t c) {
                    std::size_t lo = c * kChunk;
                    std::size_t hi = std::min(lo + kChunk, x.size());
                    for (std::size_t i = lo; i < hi; ++i) atomic_f64_add(cell, x[i]);
                });
                result.value = std::bit_cast<double>(cell.load());
            }
            return result;
        }
    }
    throw std::logic_error("unreachable variant");
}

}  // namespace fpna
