#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fpna {

struct Histogram {
    std::vector<double> bin_edges;       // length m+1, strictly increasing
    std::vector<std::uint64_t> counts;   // length m
    std::uint64_t total = 0;
};

struct GaussianFit {
    double mu = 0.0;
    double sigma = 0.0;  // > 0
};

struct PowerLawFit {
    double alpha = 0.0;  // exponent
    double beta = 0.0;   // prefactor, y = beta * n^alpha
    double r2 = 0.0;
};

// Equal-width bins spanning [min, max] of the samples; the top edge is
// inclusive. A degenerate sample set (min == max) gets one unit-wide bin.
Histogram histogram(std::span<const double> samples, std::size_t bins);

// Sample mean and unbiased sample standard deviation; throws on fewer than
// two samples or zero variance.
GaussianFit fit_gaussian(std::span<const double> samples);

// Discrete KL divergence D(p || q): p = normalized histogram counts, q =
// Gaussian mass per bin. Empty bins contribute nothing; q is floored at
// 1e-300 so empirical mass where the Gaussian predicts none shows up as a
// large (finite) divergence.
double kl_to_gaussian(const Histogram& h, const GaussianFit& g);

// Gaussian probability mass on [lo, hi].
double gaussian_bin_mass(const GaussianFit& g, double lo, double hi);

// OLS fit of log y against log n; all points must have n > 0 and y > 0.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

double max_abs(std::span<const double> samples);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Spearman rank correlation (average ranks on ties).
double spearman_rho(std::span<const double> a, std::span<const double> b);

}  // namespace fpna
