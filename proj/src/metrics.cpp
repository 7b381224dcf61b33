#include "fpna/metrics.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fpna {

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

double v_s(double f_d, double f_nd) {
    if (f_d == 0.0) throw std::invalid_argument("v_s: zero reference value");
    if (bits_equal(f_d, f_nd)) return 0.0;
    return 1.0 - f_nd / f_d;
}

ErmvResult v_ermv(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("v_ermv: shape mismatch or empty input");
    ErmvResult r;
    double acc = 0.0;
    std::size_t included = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            ++r.excluded;
            continue;
        }
        acc += std::fabs(a[i] - b[i]) / std::fabs(a[i]);
        ++included;
    }
    r.value = included == 0 ? 0.0 : acc / static_cast<double>(included);
    return r;
}

double v_c(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("v_c: shape mismatch or empty input");
    std::size_t unequal = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!bits_equal(a[i], b[i])) ++unequal;
    return static_cast<double>(unequal) / static_cast<double>(a.size());
}

}  // namespace fpna
