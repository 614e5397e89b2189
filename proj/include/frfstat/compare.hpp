#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frfstat/bands.hpp"
#include "frfstat/ecdf.hpp"
#include "frfstat/errors.hpp"
#include "frfstat/parallel.hpp"
#include "frfstat/random.hpp"
#include "frfstat/signal.hpp"

namespace frfstat {

struct ComparisonResult {
    std::vector<double> diff_mean;  ///< mean PIR of group 1 minus mean PIR of group 2
    std::vector<double> sigma;      ///< bootstrap std of the mean difference
    Band band;                      ///< diff_mean +- C_u * sigma
    bool reject_null = false;
    std::vector<double> residuals;
    Frf residual_frf;

    std::vector<double> statistics;  ///< B entries, one per outer replication
    StatEcdf ecdf;
};

struct CompareOptions {
    /// Substream tag used for each group's draws. Swapping the sets together
    /// with these tags reproduces the exact same resamples per group.
    std::array<std::uint64_t, 2> group_streams{0, 1};
};

/// Outer-replication intermediates, recorded only when requested.
struct CompareTrace {
    std::array<std::vector<std::vector<std::size_t>>, 2> indices;
    std::vector<std::vector<double>> means;  ///< replicate mean differences
    std::vector<std::vector<double>> stds;   ///< nested-bootstrap std per replication
};

/// Portion of the band that excludes zero: the lower envelope where it is
/// positive, the upper envelope where it is negative, 0 elsewhere.
inline std::vector<double> residuals(const Band& band) {
    std::vector<double> r(band.mean.size(), 0.0);
    for (std::size_t t = 0; t < r.size(); ++t) {
        if (band.lower[t] > 0.0)
            r[t] = band.lower[t];
        else if (band.upper[t] < 0.0)
            r[t] = band.upper[t];
    }
    return r;
}

/// Residuals projected back onto the grid frequencies.
inline Frf residual_frf(std::span<const double> r, const FrequencyGrid& grid) {
    return frf_from_pir(r, grid);
}

namespace detail {

/// Mean of y[outer[inner[j]]] over j; inner may be empty, meaning identity.
inline Eigen::RowVectorXd nested_mean(const CurveMatrix& y, const std::vector<std::size_t>& outer,
                                      const std::vector<std::size_t>* inner) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(y.cols());
    if (inner) {
        for (auto j : *inner) acc += y.row(static_cast<Eigen::Index>(outer[j]));
        acc /= static_cast<double>(inner->size());
    } else {
        for (auto i : outer) acc += y.row(static_cast<Eigen::Index>(i));
        acc /= static_cast<double>(outer.size());
    }
    return acc;
}

template <IndexSource Source>
std::vector<std::size_t> checked_draw(const Source& source, const DrawKey& key, std::size_t n) {
    std::vector<std::size_t> idx = source(key, n);
    if (idx.size() != n) throw InvalidArgument("index source returned a wrong-size draw");
    return idx;
}

}  // namespace detail

/// Unpaired two-group comparison of mean PIRs.
///
/// sigma is the pointwise std of Bs bootstrap mean differences. Each of the
/// B outer replications resamples both groups, forms their mean difference
/// and standardises its deviation from the observed difference by a nested
/// bootstrap std (Bs draws taken within the replicate). C_u is the alpha
/// quantile of the B max-statistics; the null is rejected when the band
/// diff_mean +- C_u * sigma excludes zero anywhere.
template <IndexSource Source>
ComparisonResult compare_unpaired(const FrfSet& set1, const FrfSet& set2, const FrequencyGrid& grid,
                                  double alpha, const BootstrapConfig& cfg, const Source& source,
                                  const CompareOptions& options = {},
                                  CompareTrace* trace = nullptr) {
    cfg.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidArgument("confidence level must lie in [0, 1]");
    if (set1.length() != set2.length())
        throw DimensionMismatch("the two groups are defined on different grids");
    detail::require_population(set1, grid, 3);
    detail::require_population(set2, grid, 3);

    const std::array<CurveMatrix, 2> y{pir_matrix(set1, grid), pir_matrix(set2, grid)};
    const std::array<std::size_t, 2> n{set1.size(), set2.size()};
    const auto& tag = options.group_streams;
    const double floor = std::max(detail::spread_floor(y[0]), detail::spread_floor(y[1]));

    const Eigen::RowVectorXd diff = row_mean(y[0]) - row_mean(y[1]);

    const std::size_t bs = cfg.nested_replications;
    CurveMatrix draws(static_cast<Eigen::Index>(bs), y[0].cols());
    for (std::size_t b2 = 0; b2 < bs; ++b2) {
        const auto i1 = detail::checked_draw(source, DrawKey{Stream::compare_sigma, b2, 0, tag[0], 0}, n[0]);
        const auto i2 = detail::checked_draw(source, DrawKey{Stream::compare_sigma, b2, 0, tag[1], 0}, n[1]);
        draws.row(static_cast<Eigen::Index>(b2)) =
            detail::nested_mean(y[0], i1, nullptr) - detail::nested_mean(y[1], i2, nullptr);
    }
    const Eigen::RowVectorXd sigma = row_std(draws, row_mean(draws));

    const std::size_t b_count = cfg.replications;
    std::vector<double> stats(b_count);
    if (trace) {
        trace->indices[0].assign(b_count, {});
        trace->indices[1].assign(b_count, {});
        trace->means.assign(b_count, {});
        trace->stds.assign(b_count, {});
    }

    detail::parallel_for(b_count, cfg.threads, [&](std::size_t b) {
        CurveMatrix nested(static_cast<Eigen::Index>(bs), y[0].cols());
        for (int attempt = 0; attempt <= detail::kMaxRedraws; ++attempt) {
            const auto a = static_cast<std::uint64_t>(attempt);
            const auto o1 = detail::checked_draw(source, DrawKey{Stream::compare_outer, b, 0, tag[0], a}, n[0]);
            const auto o2 = detail::checked_draw(source, DrawKey{Stream::compare_outer, b, 0, tag[1], a}, n[1]);
            const Eigen::RowVectorXd xb =
                detail::nested_mean(y[0], o1, nullptr) - detail::nested_mean(y[1], o2, nullptr);
            for (std::size_t b2 = 0; b2 < bs; ++b2) {
                const auto n1 = detail::checked_draw(source, DrawKey{Stream::compare_nested, b, b2, tag[0], a}, n[0]);
                const auto n2 = detail::checked_draw(source, DrawKey{Stream::compare_nested, b, b2, tag[1], a}, n[1]);
                nested.row(static_cast<Eigen::Index>(b2)) =
                    detail::nested_mean(y[0], o1, &n1) - detail::nested_mean(y[1], o2, &n2);
            }
            const Eigen::RowVectorXd sb = row_std(nested, row_mean(nested));
            if (detail::has_zero_spread(sb, floor)) continue;
            stats[b] = detail::max_standardized_deviation(diff, xb, sb);
            if (trace) {
                trace->indices[0][b] = o1;
                trace->indices[1][b] = o2;
                trace->means[b] = detail::to_vector(xb);
                trace->stds[b] = detail::to_vector(sb);
            }
            return;
        }
        throw DegenerateSpread("outer replication " + std::to_string(b) +
                               " had zero nested spread after " +
                               std::to_string(detail::kMaxRedraws) + " redraws");
    });

    ComparisonResult out;
    out.diff_mean = detail::to_vector(diff);
    out.sigma = detail::to_vector(sigma);
    out.statistics = std::move(stats);
    out.ecdf = ecdf(out.statistics, cfg.bins, cfg.quantiles);
    out.band = make_band(out.diff_mean, out.sigma, c_at(out.ecdf, alpha), alpha);
    out.residuals = residuals(out.band);
    out.reject_null = false;
    for (double r : out.residuals)
        if (r != 0.0) out.reject_null = true;
    out.residual_frf = residual_frf(out.residuals, grid);
    return out;
}

inline ComparisonResult compare_unpaired(const FrfSet& set1, const FrfSet& set2,
                                         const FrequencyGrid& grid, double alpha,
                                         const BootstrapConfig& cfg) {
    return compare_unpaired(set1, set2, grid, alpha, cfg, SeededIndexSource{cfg.seed});
}

}  // namespace frfstat
