#include "fpna/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fpna {

Histogram histogram(std::span<const double> samples, std::size_t bins) {
    if (samples.empty()) throw std::invalid_argument("histogram: empty samples");
    if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {  // degenerate sample set: one unit-wide bin
        hi = lo + 1.0;
        bins = 1;
    }

    Histogram h;
    h.bin_edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i)
        h.bin_edges[i] = lo + width * static_cast<double>(i);
    h.bin_edges[bins] = hi;  // guard against rounding drift on the top edge
    h.counts.assign(bins, 0);
    for (double v : samples) {
        auto idx = static_cast<std::size_t>((v - lo) / width);
        if (idx >= bins) idx = bins - 1;  // top edge is inclusive
        ++h.counts[idx];
    }
    h.total = samples.size();
    return h;
}

GaussianFit fit_gaussian(std::span<const double> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("fit_gaussian: need at least 2 samples");
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                  static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    if (ss == 0.0)
        throw std::invalid_argument("fit_gaussian: zero-variance sample set");
    GaussianFit g;
    g.mu = mean;
    g.sigma = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    return g;
}

double gaussian_bin_mass(const GaussianFit& g, double lo, double hi) {
    const double inv = 1.0 / (g.sigma * std::sqrt(2.0));
    return 0.5 * (std::erf((hi - g.mu) * inv) - std::erf((lo - g.mu) * inv));
}

double kl_to_gaussian(const Histogram& h, const GaussianFit& g) {
    constexpr double q_floor = 1e-300;
    double kl = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] == 0) continue;  // 0 * log 0 = 0
        double p = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
        double q = std::max(gaussian_bin_mass(g, h.bin_edges[i], h.bin_edges[i + 1]),
                            q_floor);
        kl += p * std::log(p / q);
    }
    return kl;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2)
        throw std::invalid_argument("fit_power_law: need at least 2 points");
    std::vector<double> lx(points.size()), ly(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [n, y] = points[i];
        if (!(n > 0.0) || !(y > 0.0))
            throw std::invalid_argument("fit_power_law: all points must be positive");
        lx[i] = std::log(n);
        ly[i] = std::log(y);
    }
    const auto m = static_cast<double>(points.size());
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_power_law: degenerate abscissa");
    PowerLawFit f;
    f.alpha = sxy / sxx;
    f.beta = std::exp(my - f.alpha * mx);
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

double max_abs(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("max_abs: empty input");
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::fabs(v));
    return m;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_statistic: empty sample set");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= v) ++i;
        while (j < sb.size() && sb[j] <= v) ++j;
        double fa = static_cast<double>(i) / static_cast<double>(sa.size());
        double fb = static_cast<double>(j) / static_cast<double>(sb.size());
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman_rho: need matched sets of >= 2");
    auto ra = average_ranks(a);
    auto rb = average_ranks(b);
    const auto n = static_cast<double>(a.size());
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
        sab += (ra[i] - ma) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        throw std::invalid_argument("spearman_rho: constant input");
    return sab / std::sqrt(saa * sbb);
}

}  // namespace fpna
