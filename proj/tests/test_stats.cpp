#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "fpna/fp_array.hpp"
#include "fpna/rng.hpp"
#include "fpna/stats.hpp"

using namespace fpna;

TEST_CASE("histogram worked examples") {
    std::vector<double> degenerate{0.0, 0.0, 0.0};
    Histogram h1 = histogram(degenerate, 4);
    REQUIRE(h1.counts.size() == 1);  // min == max collapses to one unit bin
    CHECK(h1.counts[0] == 3);
    CHECK(h1.total == 3);

    std::vector<double> v{0.0, 1.0, 2.0, 3.0};
    Histogram h2 = histogram(v, 2);
    REQUIRE(h2.counts.size() == 2);
    CHECK(h2.bin_edges.front() == 0.0);
    CHECK(h2.bin_edges.back() == 3.0);
    CHECK(h2.counts[0] == 2);
    CHECK(h2.counts[1] == 2);  // top edge inclusive: 3.0 lands in the last bin
}

TEST_CASE("histogram conserves mass and respects edges") {
    FpArray x = FpArray::uniform({RngAlgorithm::Mt19937_64, 8}, 100000, -3.0, 7.0);
    Histogram h = histogram(x.values(), 101);
    REQUIRE(h.counts.size() == 101);
    REQUIRE(h.bin_edges.size() == 102);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}) ==
          x.size());
    for (std::size_t i = 0; i + 1 < h.bin_edges.size(); ++i)
        REQUIRE(h.bin_edges[i] < h.bin_edges[i + 1]);
    CHECK_THROWS_AS(histogram(std::span<const double>{}, 10), std::invalid_argument);
    CHECK_THROWS_AS(histogram(x.values(), 0), std::invalid_argument);
}

TEST_CASE("fit_gaussian worked examples") {
    std::vector<double> v{0.0, 2.0};
    GaussianFit g = fit_gaussian(v);
    CHECK(g.mu == 1.0);
    CHECK(g.sigma == doctest::Approx(std::sqrt(2.0)));

    std::vector<double> flat{5.0, 5.0, 5.0};
    CHECK_THROWS_AS(fit_gaussian(flat), std::invalid_argument);
    CHECK_THROWS_AS(fit_gaussian(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("fit_gaussian recovers generator parameters") {
    FpArray x = FpArray::normal({RngAlgorithm::Mt19937_64, 12}, 1000000, 3.0, 2.0);
    GaussianFit g = fit_gaussian(x.values());
    CHECK(g.mu == doctest::Approx(3.0).epsilon(0.01));
    CHECK(g.sigma == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("KL divergence of a Gaussian against itself is tiny") {
    // Histogram counts manufactured from the Gaussian's own bin masses, so
    // p equals q up to integer rounding at 2^40 total mass.
    GaussianFit g{0.0, 1.0};
    Histogram h;
    std::size_t bins = 64;
    double lo = -6.0, hi = 6.0;
    double w = (hi - lo) / static_cast<double>(bins);
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + w * static_cast<double>(i);
    h.counts.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        double mass = gaussian_bin_mass(g, h.bin_edges[i], h.bin_edges[i + 1]);
        h.counts[i] = static_cast<std::uint64_t>(std::llround(mass * 0x1.0p40));
        h.total += h.counts[i];
    }
    CHECK(kl_to_gaussian(h, g) < 1e-8);
}

TEST_CASE("KL separates Gaussian data from a bimodal control") {
    FpArray x = FpArray::normal({RngAlgorithm::Mt19937_64, 13}, 100000, 0.0, 1.0);
    Histogram hx = histogram(x.values(), 101);
    GaussianFit gx = fit_gaussian(x.values());
    CHECK(kl_to_gaussian(hx, gx) < 0.01);

    FpArray a = FpArray::normal({RngAlgorithm::Mt19937_64, 14}, 50000, -4.0, 1.0);
    FpArray b = FpArray::normal({RngAlgorithm::Mt19937_64, 15}, 50000, 4.0, 1.0);
    std::vector<double> mixed(a.values().begin(), a.values().end());
    mixed.insert(mixed.end(), b.values().begin(), b.values().end());
    Histogram hm = histogram(mixed, 101);
    GaussianFit gm = fit_gaussian(mixed);
    CHECK(kl_to_gaussian(hm, gm) > 0.1);
}

TEST_CASE("gaussian_bin_mass sums to one and is symmetric") {
    GaussianFit g{1.5, 0.75};
    CHECK(gaussian_bin_mass(g, -1e9, 1e9) == doctest::Approx(1.0));
    CHECK(gaussian_bin_mass(g, 1.5, 2.0) ==
          doctest::Approx(gaussian_bin_mass(g, 1.0, 1.5)));
}

TEST_CASE("fit_power_law exact and degenerate cases") {
    std::vector<std::pair<double, double>> pts{{1.0, 2.0}, {4.0, 4.0}, {16.0, 8.0}};
    PowerLawFit f = fit_power_law(pts);
    CHECK(f.alpha == doctest::Approx(0.5));
    CHECK(f.beta == doctest::Approx(2.0));
    CHECK(f.r2 == doctest::Approx(1.0));

    std::vector<std::pair<double, double>> flat{{1.0, 3.0}, {2.0, 3.0}, {8.0, 3.0}};
    PowerLawFit ff = fit_power_law(flat);
    CHECK(ff.alpha == doctest::Approx(0.0));
    CHECK(ff.beta == doctest::Approx(3.0));

    std::vector<std::pair<double, double>> bad{{1.0, 2.0}, {2.0, -1.0}};
    CHECK_THROWS_AS(fit_power_law(bad), std::invalid_argument);
    std::vector<std::pair<double, double>> single{{1.0, 2.0}};
    CHECK_THROWS_AS(fit_power_law(single), std::invalid_argument);
}

TEST_CASE("max_abs") {
    std::vector<double> v{-3.0, 2.0, 2.5};
    CHECK(max_abs(v) == 3.0);
    CHECK_THROWS_AS(max_abs(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("ks_statistic separates what it should") {
    FpArray a = FpArray::uniform({RngAlgorithm::Mt19937_64, 20}, 5000, 0.0, 1.0);
    FpArray b = FpArray::uniform({RngAlgorithm::Mt19937_64, 21}, 5000, 0.0, 1.0);
    CHECK(ks_statistic(a.values(), b.values()) < 0.05);

    FpArray c = FpArray::uniform({RngAlgorithm::Mt19937_64, 22}, 5000, 0.5, 1.5);
    CHECK(ks_statistic(a.values(), c.values()) > 0.4);

    std::vector<double> same{1.0, 2.0, 3.0};
    CHECK(ks_statistic(same, same) == 0.0);
    CHECK_THROWS_AS(ks_statistic(std::span<const double>{}, same),
                    std::invalid_argument);
}

TEST_CASE("spearman_rho handles monotone, reversed, and tied data") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> inc{2.0, 4.0, 8.0, 16.0, 32.0};
    CHECK(spearman_rho(x, inc) == doctest::Approx(1.0));
    std::vector<double> dec{5.0, 4.0, 3.0, 2.0, 1.0};
    CHECK(spearman_rho(x, dec) == doctest::Approx(-1.0));

    // Ties get average ranks; the coefficient stays within [-1, 1].
    std::vector<double> tied{1.0, 1.0, 2.0, 2.0, 3.0};
    double rho = spearman_rho(x, tied);
    CHECK(rho > 0.9);
    CHECK(rho <= 1.0);
    CHECK_THROWS_AS(spearman_rho(x, std::vector<double>{1.0}), std::invalid_argument);
}
