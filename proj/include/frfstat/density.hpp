#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <tuple>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frfstat/bands.hpp"
#include "frfstat/ecdf.hpp"
#include "frfstat/errors.hpp"
#include "frfstat/parallel.hpp"
#include "frfstat/random.hpp"
#include "frfstat/signal.hpp"

namespace frfstat {

/// Distance between two PIRs sampled on the same grid.
///
/// The integrated-squared metric is the plain sum of squared differences
/// (no time-step factor), so values scale with the sample rate.
class DistanceMetric {
public:
    enum class Kind { integrated_squared, max_absolute, custom };
    using Function = std::function<double(std::span<const double>, std::span<const double>)>;

    static DistanceMetric integrated_squared() { return DistanceMetric(Kind::integrated_squared); }
    static DistanceMetric max_absolute() { return DistanceMetric(Kind::max_absolute); }
    static DistanceMetric custom(Function fn) {
        if (!fn) throw InvalidArgument("custom distance metric is empty");
        DistanceMetric m(Kind::custom);
        m.fn_ = std::move(fn);
        return m;
    }

    Kind kind() const noexcept { return kind_; }

    double operator()(std::span<const double> a, std::span<const double> b) const {
        if (a.size() != b.size()) throw DimensionMismatch("distance between curves of different length");
        switch (kind_) {
            case Kind::integrated_squared: {
                double s = 0.0;
                for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
                return s;
            }
            case Kind::max_absolute: {
                double m = 0.0;
                for (std::size_t t = 0; t < a.size(); ++t) m = std::max(m, std::abs(a[t] - b[t]));
                return m;
            }
            case Kind::custom:
                return fn_(a, b);
        }
        return 0.0;
    }

private:
    explicit DistanceMetric(Kind kind) : kind_(kind) {}

    Kind kind_;
    Function fn_;
};

/// How the incremental ratio for the density is normalised.
enum class PdfNumerator {
    /// Ds / (N * (x2 - x1)), as in the reference implementation.
    code_compatible,
    /// (i2 - i1) / (N * (x2 - x1)), the actual index span of the window.
    index_span,
};

struct DensityEstimate {
    double cdf_mean = 0.0;
    double cdf_std = 0.0;
    double pdf_mean = 0.0;
    double pdf_std = 0.0;
    std::size_t window = 0;  ///< Ds
    PdfNumerator numerator_mode = PdfNumerator::code_compatible;

    std::vector<std::size_t> ranks;      ///< 1-based rank of the test per replication
    std::vector<double> pdf_statistics;  ///< per replication; NaN where the window had zero width
    std::size_t skipped = 0;
};

namespace detail {

inline std::span<const double> row_span(const CurveMatrix& y, Eigen::Index i) {
    return {y.data() + i * y.cols(), static_cast<std::size_t>(y.cols())};
}

inline std::span<const double> row_span(const Eigen::RowVectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Mean and sample std of a vector; std is 0 for a single value.
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

inline constexpr double kMaxSkippedFraction = 0.2;

}  // namespace detail

/// Bootstrap estimate of F(x) = P[X <= x] and f = dF/dx for the distance
/// of a test sample from the population mean.
///
/// Per replication the set is resampled, the distances of the resampled
/// members to their mean are sorted (es) and the test's distance et is
/// ranked: idx = first 1-based position with es > et, or N. The CDF
/// statistic is idx / N. The density uses a window of Ds = max(1, N / 20)
/// positions on each side of idx, shifted inward at the ends.
template <IndexSource Source>
DensityEstimate estimate_density(const Frf& test, const FrfSet& set, const FrequencyGrid& grid,
                                 const BootstrapConfig& cfg, const DistanceMetric& metric,
                                 PdfNumerator numerator, const Source& source) {
    cfg.validate();
    detail::require_population(set, grid, 3);
    detail::require_aligned(test, grid);
    const CurveMatrix y = pir_matrix(set, grid);
    const Pir xt = pir_from_frf(test, grid);
    const std::span<const double> test_span(xt.values);

    const std::size_t n = set.size();
    const std::size_t ds = std::max<std::size_t>(1, n / 20);
    const std::size_t b_count = cfg.replications;

    std::vector<std::size_t> ranks(b_count);
    std::vector<double> pdf(b_count, std::numeric_limits<double>::quiet_NaN());

    detail::parallel_for(b_count, cfg.threads, [&](std::size_t b) {
        const std::vector<std::size_t> idx = source(DrawKey{Stream::density, b, 0, 0, 0}, n);
        if (idx.size() != n) throw InvalidArgument("index source returned a wrong-size draw");
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(y.cols());
        for (auto i : idx) mean += y.row(static_cast<Eigen::Index>(i));
        mean /= static_cast<double>(n);
        const auto center = detail::row_span(mean);

        std::vector<double> es(n);
        for (std::size_t j = 0; j < n; ++j)
            es[j] = metric(detail::row_span(y, static_cast<Eigen::Index>(idx[j])), center);
        std::sort(es.begin(), es.end());
        const double et = metric(test_span, center);

        const auto above = std::upper_bound(es.begin(), es.end(), et);
        const std::size_t rank =
            above == es.end() ? n : static_cast<std::size_t>(above - es.begin()) + 1;
        ranks[b] = rank;

        // 1-based window [i1, i2] around the rank
        std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(rank) - static_cast<std::ptrdiff_t>(ds);
        std::ptrdiff_t i2 = static_cast<std::ptrdiff_t>(rank) + static_cast<std::ptrdiff_t>(ds);
        if (i1 < 1) {
            i1 = 1;
            i2 = 1 + static_cast<std::ptrdiff_t>(ds);
        }
        if (i2 > static_cast<std::ptrdiff_t>(n)) {
            i2 = static_cast<std::ptrdiff_t>(n);
            i1 = static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(ds);
        }
        const double dx = es[static_cast<std::size_t>(i2 - 1)] - es[static_cast<std::size_t>(i1 - 1)];
        if (!(dx > 0.0)) return;
        const double num = numerator == PdfNumerator::code_compatible
                               ? static_cast<double>(ds)
                               : static_cast<double>(i2 - i1);
        pdf[b] = num / (static_cast<double>(n) * dx);
    });

    DensityEstimate out;
    out.window = ds;
    out.numerator_mode = numerator;
    out.ranks = std::move(ranks);
    std::vector<double> cdf_stats(b_count);
    for (std::size_t b = 0; b < b_count; ++b)
        cdf_stats[b] = static_cast<double>(out.ranks[b]) / static_cast<double>(n);
    std::vector<double> valid_pdf;
    for (double v : pdf) {
        if (std::isnan(v))
            ++out.skipped;
        else
            valid_pdf.push_back(v);
    }
    out.pdf_statistics = std::move(pdf);
    if (static_cast<double>(out.skipped) > detail::kMaxSkippedFraction * static_cast<double>(b_count))
        throw ZeroSpread(std::to_string(out.skipped) + " of " + std::to_string(b_count) +
                         " replications had a zero-width density window");

    std::tie(out.cdf_mean, out.cdf_std) = detail::mean_std(cdf_stats);
    std::tie(out.pdf_mean, out.pdf_std) = detail::mean_std(valid_pdf);
    return out;
}

inline DensityEstimate estimate_density(const Frf& test, const FrfSet& set,
                                        const FrequencyGrid& grid, const BootstrapConfig& cfg,
                                        const DistanceMetric& metric = DistanceMetric::integrated_squared(),
                                        PdfNumerator numerator = PdfNumerator::code_compatible) {
    return estimate_density(test, set, grid, cfg, metric, numerator, SeededIndexSource{cfg.seed});
}

}  // namespace frfstat
