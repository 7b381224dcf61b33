#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fpna {

enum class RngAlgorithm { Mt19937_64, Xorwow };

std::string to_string(RngAlgorithm a);
RngAlgorithm rng_algorithm_from_string(const std::string& s);

struct RngSpec {
    RngAlgorithm algorithm = RngAlgorithm::Mt19937_64;
    std::uint64_t seed = 0;
};

// XORWOW (Marsaglia 2003), the five-word xorshift with a Weyl counter:
//   t = x ^ (x >> 2); x = y; y = z; z = w; w = v;
//   v = (v ^ (v << 4)) ^ (t ^ (t << 1));
//   d = d + 362437;  output = d + v           (32-bit words)
// State is seeded by running splitmix64 on the seed and taking the low/high
// halves of successive outputs; the counter d starts at 0.
class XorwowEngine {
public:
    explicit XorwowEngine(std::uint64_t seed);
    std::uint32_t next_u32();

private:
    std::uint32_t s_[5];
    std::uint32_t d_ = 0;
};

// Deterministic 64-bit word stream. Mt19937_64 is the standard Mersenne
// Twister engine, whose output stream is pinned bit-exactly by the C++
// standard. Xorwow emits two 32-bit words per 64-bit output, high half first.
class Rng {
public:
    explicit Rng(RngSpec spec);

    std::uint64_t next_u64();

    // (word >> 11) * 2^-53, i.e. the top 53 bits mapped onto [0, 1).
    double next_unit();

    // Uniform integer in [0, bound) via modulo; bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound);

    RngSpec spec() const { return spec_; }

private:
    RngSpec spec_;
    std::mt19937_64 mt_;
    XorwowEngine xw_;
};

// splitmix64 step; used for state expansion and derived-seed construction.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent child seed from a master seed and a stream index;
// used wherever an experiment needs one seed per sample/array.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace fpna
