#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fpna/rng.hpp"

namespace fpna {

enum class DistTag { Uniform, Normal, Explicit };

std::string to_string(DistTag t);

// Immutable 1-D sequence of finite binary64 values plus the provenance needed
// to regenerate it bitwise (distribution, parameters, seed).
class FpArray {
public:
    // Construction rejects NaN/Inf elements.
    static FpArray from_values(std::vector<double> values);

    static FpArray uniform(RngSpec rng, std::size_t n, double lo, double hi);
    static FpArray normal(RngSpec rng, std::size_t n, double mu, double sigma);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    DistTag dist_tag() const { return dist_; }
    std::uint64_t seed() const { return rng_.seed; }
    RngSpec rng_spec() const { return rng_; }
    // Distribution parameters: (lo, hi) for uniform, (mu, sigma) for normal.
    double param_a() const { return param_a_; }
    double param_b() const { return param_b_; }

private:
    FpArray() = default;

    std::vector<double> values_;
    DistTag dist_ = DistTag::Explicit;
    RngSpec rng_{};
    double param_a_ = 0.0;
    double param_b_ = 0.0;
};

// Fisher-Yates shuffle driven by the documented generator; preserves the
// value multiset bitwise. The result is tagged Explicit.
FpArray permute(const FpArray& x, std::uint64_t seed);

// In-place index shuffle used by the replay backends: identity permutation of
// [0, n) shuffled with Fisher-Yates (i from n-1 down to 1, j = word mod (i+1)).
void shuffle_indices(std::vector<std::uint32_t>& idx, std::uint64_t seed);

// FPNA0001 raw array container: magic "FPNA0001", little-endian u64 count,
// then count little-endian binary64 values. Bit-exact round trip.
void write_fpna_file(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_fpna_file(const std::filesystem::path& path);

}  // namespace fpna
