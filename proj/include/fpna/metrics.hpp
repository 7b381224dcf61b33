#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fpna {

// Scalar variability 1 - f_nd / f_d; exactly 0.0 for bitwise-identical
// inputs. Throws on a zero reference.
double v_s(double f_d, double f_nd);

bool bits_equal(double a, double b);

struct ErmvResult {
    double value = 0.0;          // mean of |A-B|/|A| over included elements
    std::size_t excluded = 0;    // positions with A == 0, left out of the mean
};

// Elementwise relative mean absolute variation. Denominator is A (not
// symmetric); zero-denominator positions are excluded and counted.
ErmvResult v_ermv(std::span<const double> a, std::span<const double> b);

// Fraction of positions where A and B are not bitwise equal, so -0.0 vs
// +0.0 (and differing NaN payloads) count as unequal.
double v_c(std::span<const double> a, std::span<const double> b);

}  // namespace fpna
