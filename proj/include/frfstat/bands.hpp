#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frfstat/ecdf.hpp"
#include "frfstat/errors.hpp"
#include "frfstat/grid.hpp"
#include "frfstat/parallel.hpp"
#include "frfstat/random.hpp"
#include "frfstat/signal.hpp"

namespace frfstat {

/// mean +- scale * std envelope over the time grid.
struct Band {
    std::vector<double> mean;
    std::vector<double> std;
    double scale = 0.0;
    std::vector<double> upper;
    std::vector<double> lower;
    double alpha = 0.0;
};

inline Band make_band(std::vector<double> mean, std::vector<double> std, double scale,
                      double alpha) {
    if (mean.size() != std.size()) throw DimensionMismatch("band mean and std differ in length");
    Band b{std::move(mean), std::move(std), scale, {}, {}, alpha};
    b.upper.resize(b.mean.size());
    b.lower.resize(b.mean.size());
    for (std::size_t t = 0; t < b.mean.size(); ++t) {
        b.upper[t] = b.mean[t] + scale * b.std[t];
        b.lower[t] = b.mean[t] - scale * b.std[t];
    }
    return b;
}

/// Per-replication intermediates, recorded only when a trace is requested.
struct ReplicateTrace {
    std::vector<std::vector<std::size_t>> indices;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> stds;

    void resize(std::size_t n) {
        indices.resize(n);
        means.resize(n);
        stds.resize(n);
    }
};

namespace detail {

inline constexpr int kMaxRedraws = 10;

/// Spreads at or below this are treated as zero: rounding in the mean of
/// identical rows leaves residues of order eps * |values|.
inline double spread_floor(const CurveMatrix& y) {
    return 1e-13 * (y.size() == 0 ? 0.0 : y.cwiseAbs().maxCoeff());
}

inline bool has_zero_spread(const Eigen::RowVectorXd& spread, double floor) {
    return (spread.array() <= floor).any();
}

struct Moments {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd std;
};

/// Mean and sample std (N - 1 divisor) of the rows y[idx[0]], y[idx[1]], ...
inline Moments resampled_moments(const CurveMatrix& y, const std::vector<std::size_t>& idx) {
    Moments m;
    m.mean = Eigen::RowVectorXd::Zero(y.cols());
    for (auto i : idx) m.mean += y.row(static_cast<Eigen::Index>(i));
    m.mean /= static_cast<double>(idx.size());
    m.std = Eigen::RowVectorXd::Zero(y.cols());
    for (auto i : idx) m.std.array() += (y.row(static_cast<Eigen::Index>(i)) - m.mean).array().square();
    m.std = (m.std / static_cast<double>(idx.size() - 1)).array().sqrt();
    return m;
}

/// max_t |x(t) - center(t)| / spread(t)
template <class Row>
double max_standardized_deviation(const Row& x, const Eigen::RowVectorXd& center,
                                  const Eigen::RowVectorXd& spread) {
    return ((x - center).array().abs() / spread.array()).maxCoeff();
}

inline std::vector<double> to_vector(const Eigen::RowVectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline void require_population(const FrfSet& set, const FrequencyGrid& grid, std::size_t min_n) {
    if (set.size() < min_n)
        throw InvalidArgument("need at least " + std::to_string(min_n) + " samples, got " +
                              std::to_string(set.size()));
    require_aligned(set, grid);
}

}  // namespace detail

/// Pivotized bootstrap pool for prediction bands: for every replication b
/// the set is resampled, its mean and std recomputed, and every ORIGINAL
/// curve i contributes max_t |y_i(t) - mean_b(t)| / std_b(t). The pool has
/// B * N entries, replication-major.
template <IndexSource Source>
std::vector<double> pivot_statistics(const CurveMatrix& y, const BootstrapConfig& cfg,
                                     const Source& source, ReplicateTrace* trace = nullptr) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(y.rows());
    const std::size_t b_count = cfg.replications;
    const double floor = detail::spread_floor(y);
    std::vector<double> stats(b_count * n);
    if (trace) trace->resize(b_count);

    detail::parallel_for(b_count, cfg.threads, [&](std::size_t b) {
        for (int attempt = 0; attempt <= detail::kMaxRedraws; ++attempt) {
            DrawKey key{Stream::band, b, 0, 0, static_cast<std::uint64_t>(attempt)};
            std::vector<std::size_t> idx = source(key, n);
            if (idx.size() != n) throw InvalidArgument("index source returned a wrong-size draw");
            const detail::Moments m = detail::resampled_moments(y, idx);
            if (detail::has_zero_spread(m.std, floor)) continue;
            for (std::size_t i = 0; i < n; ++i)
                stats[b * n + i] = detail::max_standardized_deviation(
                    y.row(static_cast<Eigen::Index>(i)), m.mean, m.std);
            if (trace) {
                trace->indices[b] = std::move(idx);
                trace->means[b] = detail::to_vector(m.mean);
                trace->stds[b] = detail::to_vector(m.std);
            }
            return;
        }
        throw DegenerateSpread("bootstrap replication " + std::to_string(b) +
                               " had zero spread after " +
                               std::to_string(detail::kMaxRedraws) + " redraws");
    });
    return stats;
}

struct BandAnalysis {
    Band band;
    StatEcdf ecdf;
    std::vector<double> statistics;  ///< replication-major, B * N
};

namespace detail {

struct Population {
    CurveMatrix pirs;
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd std;
};

inline Population population(const FrfSet& set, const FrequencyGrid& grid) {
    require_population(set, grid, 3);
    Population p;
    p.pirs = pir_matrix(set, grid);
    p.mean = row_mean(p.pirs);
    p.std = row_std(p.pirs, p.mean);
    if (has_zero_spread(p.std, spread_floor(p.pirs)))
        throw DegenerateSpread("the sample set has zero spread at some time instant");
    return p;
}

}  // namespace detail

template <IndexSource Source>
BandAnalysis prediction_band_analysis(const FrfSet& set, const FrequencyGrid& grid, double alpha,
                                      const BootstrapConfig& cfg, const Source& source,
                                      ReplicateTrace* trace = nullptr) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidArgument("confidence level must lie in [0, 1]");
    const detail::Population p = detail::population(set, grid);
    BandAnalysis out;
    out.statistics = pivot_statistics(p.pirs, cfg, source, trace);
    out.ecdf = ecdf(out.statistics, cfg.bins, cfg.quantiles);
    const double cp = c_at(out.ecdf, alpha);
    out.band = make_band(detail::to_vector(p.mean), detail::to_vector(p.std), cp, alpha);
    return out;
}

/// Band expected to contain the PIR of a new draw from the population with
/// probability alpha.
inline Band prediction_band(const FrfSet& set, const FrequencyGrid& grid, double alpha,
                            const BootstrapConfig& cfg) {
    return prediction_band_analysis(set, grid, alpha, cfg, SeededIndexSource{cfg.seed}).band;
}

struct MinimalBand {
    Band band;               ///< scale = C_p of the test sample, alpha = its confidence
    double alpha = 0.0;
    StatEcdf ecdf;
    std::vector<double> statistics;
    std::size_t peak_index = 0;  ///< time index where the test deviates most
};

/// Tightest band of the prediction-band family that still contains the test
/// PIR, and the confidence level that band corresponds to.
template <IndexSource Source>
MinimalBand minimal_prediction_band(const Frf& test, const FrfSet& set, const FrequencyGrid& grid,
                                    const BootstrapConfig& cfg, const Source& source,
                                    ReplicateTrace* trace = nullptr) {
    detail::require_aligned(test, grid);
    const detail::Population p = detail::population(set, grid);
    const Pir xt = pir_from_frf(test, grid);
    const Eigen::Map<const Eigen::RowVectorXd> x(xt.values.data(),
                                                 static_cast<Eigen::Index>(xt.values.size()));

    MinimalBand out;
    const Eigen::RowVectorXd z = (x - p.mean).array().abs() / p.std.array();
    Eigen::Index peak = 0;
    const double cp = z.maxCoeff(&peak);
    out.peak_index = static_cast<std::size_t>(peak);

    out.statistics = pivot_statistics(p.pirs, cfg, source, trace);
    out.ecdf = ecdf(out.statistics, cfg.bins, cfg.quantiles);
    out.alpha = alpha_at(out.ecdf, cp);
    out.band = make_band(detail::to_vector(p.mean), detail::to_vector(p.std), cp, out.alpha);
    return out;
}

inline MinimalBand minimal_prediction_band(const Frf& test, const FrfSet& set,
                                           const FrequencyGrid& grid, const BootstrapConfig& cfg) {
    return minimal_prediction_band(test, set, grid, cfg, SeededIndexSource{cfg.seed});
}

}  // namespace frfstat
