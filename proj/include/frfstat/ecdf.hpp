#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "frfstat/errors.hpp"

namespace frfstat {

/// How bootstrap statistics are turned into quantiles.
enum class QuantileMode {
    /// Equal-width cumulative histogram (the reference behaviour).
    histogram,
    /// Exact order statistics, for convergence studies.
    exact,
};

struct BootstrapConfig {
    std::size_t replications = 1000;        ///< B
    std::size_t nested_replications = 50;   ///< Bs, only used by the unpaired comparison
    std::uint64_t seed = 1;
    std::size_t bins = 1000;
    QuantileMode quantiles = QuantileMode::histogram;
    unsigned threads = 1;                   ///< 0 = hardware concurrency

    void validate() const {
        if (replications < 1) throw InvalidArgument("B (replications) must be >= 1");
        if (nested_replications < 2)
            throw InvalidArgument("Bs (nested replications) must be >= 2");
        if (bins < 2) throw InvalidArgument("histogram bin count must be >= 2");
    }
};

/// Empirical distribution of a pool of bootstrap statistics.
///
/// Bin k spans [edges[k], edges[k+1]]; cdf[k] is the fraction of
/// statistics <= edges[k+1], so cdf is non-decreasing and ends at 1.
struct StatEcdf {
    std::vector<double> sorted_stats;
    std::vector<double> bin_edges;
    std::vector<double> cdf;
    QuantileMode mode = QuantileMode::histogram;

    std::size_t bins() const noexcept { return cdf.size(); }
    double bin_width() const noexcept { return bin_edges[1] - bin_edges[0]; }
};

inline StatEcdf ecdf(std::span<const double> stats, std::size_t bins,
                     QuantileMode mode = QuantileMode::histogram) {
    if (stats.empty()) throw InvalidArgument("ECDF of an empty statistic vector");
    if (bins < 2) throw InvalidArgument("histogram bin count must be >= 2");
    for (double s : stats)
        if (!std::isfinite(s)) throw InvalidArgument("non-finite bootstrap statistic");

    StatEcdf e;
    e.mode = mode;
    e.sorted_stats.assign(stats.begin(), stats.end());
    std::sort(e.sorted_stats.begin(), e.sorted_stats.end());

    const double lo = e.sorted_stats.front();
    double hi = e.sorted_stats.back();
    if (!(hi > lo)) hi = lo + std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo));

    e.bin_edges.resize(bins + 1);
    const double span = hi - lo;
    for (std::size_t k = 0; k < bins; ++k)
        e.bin_edges[k] = lo + span * static_cast<double>(k) / static_cast<double>(bins);
    e.bin_edges[bins] = hi;

    const auto n = static_cast<double>(e.sorted_stats.size());
    e.cdf.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const auto below = std::upper_bound(e.sorted_stats.begin(), e.sorted_stats.end(),
                                            e.bin_edges[k + 1]) -
                           e.sorted_stats.begin();
        e.cdf[k] = static_cast<double>(below) / n;
    }
    e.cdf[bins - 1] = 1.0;
    return e;
}

/// Confidence level at which a band of scale `c` is the tightest band of
/// its family: the smallest alpha for which c_at(e, alpha) >= c. Returns 0
/// below the range and 1 above it.
inline double alpha_at(const StatEcdf& e, double c) {
    if (!std::isfinite(c)) throw InvalidArgument("alpha_at needs a finite scale");
    if (e.mode == QuantileMode::exact) {
        const auto below = std::lower_bound(e.sorted_stats.begin(), e.sorted_stats.end(), c) -
                           e.sorted_stats.begin();
        return static_cast<double>(below) / static_cast<double>(e.sorted_stats.size());
    }
    // First bin whose left edge reaches c; its predecessor is the bin holding c.
    const auto left_end = e.bin_edges.begin() + static_cast<std::ptrdiff_t>(e.bins());
    const auto j = std::lower_bound(e.bin_edges.begin(), left_end, c) - e.bin_edges.begin();
    if (j == 0) return 0.0;
    return e.cdf[static_cast<std::size_t>(j - 1)];
}

/// Scale constant for confidence alpha: the left edge of the first bin whose
/// cumulative fraction exceeds alpha (the maximum statistic when none does).
inline double c_at(const StatEcdf& e, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidArgument("confidence level must lie in [0, 1]");
    if (e.mode == QuantileMode::exact) {
        const std::size_t n = e.sorted_stats.size();
        const auto frac = [n](std::size_t k) {
            return static_cast<double>(k) / static_cast<double>(n);
        };
        auto k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
        while (k > 0 && frac(k) > alpha) --k;
        while (k < n && frac(k + 1) <= alpha) ++k;
        return e.sorted_stats[std::min(k, n - 1)];
    }
    const auto it = std::upper_bound(e.cdf.begin(), e.cdf.end(), alpha);
    if (it == e.cdf.end()) return e.bin_edges.back();
    return e.bin_edges[static_cast<std::size_t>(it - e.cdf.begin())];
}

}  // namespace frfstat
