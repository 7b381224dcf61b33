#include "fpna/rng.hpp"

#include <stdexcept>

namespace fpna {

std::string to_string(RngAlgorithm a) {
    switch (a) {
        case RngAlgorithm::Mt19937_64: return "mt19937_64";
        case RngAlgorithm::Xorwow: return "xorwow";
    }
    return "?";
}

RngAlgorithm rng_algorithm_from_string(const std::string& s) {
    if (s == "mt19937_64") return RngAlgorithm::Mt19937_64;
    if (s == "xorwow") return RngAlgorithm::Xorwow;
    throw std::invalid_argument("unknown rng algorithm: " + s);
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0xa0761d6478bd642fULL * (stream + 1));
    return splitmix64(s);
}

XorwowEngine::XorwowEngine(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (int i = 0; i < 5; ++i) {
        std::uint64_t w = splitmix64(sm);
        s_[i] = static_cast<std::uint32_t>(w ^ (w >> 32));
        if (s_[i] == 0) s_[i] = 0x6c078965u + static_cast<std::uint32_t>(i);
    }
    d_ = 0;
}

std::uint32_t XorwowEngine::next_u32() {
    std::uint32_t t = s_[0] ^ (s_[0] >> 2);
    s_[0] = s_[1];
    s_[1] = s_[2];
    s_[2] = s_[3];
    s_[3] = s_[4];
    s_[4] = (s_[4] ^ (s_[4] << 4)) ^ (t ^ (t << 1));
    d_ += 362437u;
    return d_ + s_[4];
}

Rng::Rng(RngSpec spec) : spec_(spec), mt_(spec.seed), xw_(spec.seed) {}

std::uint64_t Rng::next_u64() {
    if (spec_.algorithm == RngAlgorithm::Mt19937_64) return mt_();
    std::uint64_t hi = xw_.next_u32();
    std::uint64_t lo = xw_.next_u32();
    return (hi << 32) | lo;
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
    return next_u64() % bound;
}

}  // namespace fpna
