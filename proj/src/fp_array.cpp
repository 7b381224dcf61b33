#include "fpna/fp_array.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fpna {

namespace {

constexpr char kMagic[8] = {'F', 'P', 'N', 'A', '0', '0', '0', '1'};

void check_finite(std::span<const double> values) {
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("FpArray: values must be finite");
}

}  // namespace

std::string to_string(DistTag t) {
    switch (t) {
        case DistTag::Uniform: return "uniform";
        case DistTag::Normal: return "normal";
        case DistTag::Explicit: return "explicit";
    }
    return "?";
}

FpArray FpArray::from_values(std::vector<double> values) {
    check_finite(values);
    FpArray a;
    a.values_ = std::move(values);
    a.dist_ = DistTag::Explicit;
    return a;
}

FpArray FpArray::uniform(RngSpec rng, std::size_t n, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform: need lo < hi");
    Rng gen(rng);
    std::vector<double> values(n);
    for (auto& v : values) {
        v = lo + gen.next_unit() * (hi - lo);
        if (v >= hi) v = std::nextafter(hi, lo);
    }
    FpArray a;
    a.values_ = std::move(values);
    a.dist_ = DistTag::Uniform;
    a.rng_ = rng;
    a.param_a_ = lo;
    a.param_b_ = hi;
    return a;
}

FpArray FpArray::normal(RngSpec rng, std::size_t n, double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("normal: need sigma > 0");
    Rng gen(rng);
    std::vector<double> values(n);
    // Box-Muller over consecutive word pairs: u1 on (0,1] (so log(u1) is
    // finite), u2 on [0,1); z0 = r cos(2*pi*u2), z1 = r sin(2*pi*u2).
    // Pairs are consumed in order; the trailing z1 of an odd-length request
    // is discarded.
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < n; i += 2) {
        double u1 = static_cast<double>((gen.next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = gen.next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        values[i] = mu + sigma * (r * std::cos(two_pi * u2));
        if (i + 1 < n) values[i + 1] = mu + sigma * (r * std::sin(two_pi * u2));
    }
    FpArray a;
    a.values_ = std::move(values);
    a.dist_ = DistTag::Normal;
    a.rng_ = rng;
    a.param_a_ = mu;
    a.param_b_ = sigma;
    return a;
}

void shuffle_indices(std::vector<std::uint32_t>& idx, std::uint64_t seed) {
    Rng gen(RngSpec{RngAlgorithm::Mt19937_64, seed});
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::uint64_t j = gen.next_below(i);
        std::swap(idx[i - 1], idx[j]);
    }
}

FpArray permute(const FpArray& x, std::uint64_t seed) {
    std::vector<std::uint32_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    shuffle_indices(idx, seed);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = x.values()[idx[i]];
    return FpArray::from_values(std::move(out));
}

void write_fpna_file(const std::filesystem::path& path, std::span<const double> values) {
    static_assert(std::endian::native == std::endian::little,
                  "FPNA0001 writer assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    std::uint64_t n = values.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_fpna_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("bad FPNA0001 magic: " + path.string());
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    std::vector<double> values(n);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("truncated FPNA0001 file: " + path.string());
    return values;
}

}  // namespace fpna
