#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frfstat/errors.hpp"
#include "frfstat/grid.hpp"

namespace frfstat {

using Complex = std::complex<double>;

/// Row-major sample matrix: one PIR (or other curve) per row, one time
/// instant per column.
using CurveMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Frequency response: one complex gain per grid frequency.
class Frf {
public:
    Frf() = default;
    explicit Frf(std::vector<Complex> values) : values_(std::move(values)) {
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (!std::isfinite(values_[k].real()) || !std::isfinite(values_[k].imag()))
                throw InvalidArgument("FRF component " + std::to_string(k + 1) +
                                      " is not finite");
    }

    const std::vector<Complex>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const Complex& operator[](std::size_t k) const { return values_[k]; }

    friend bool operator==(const Frf&, const Frf&) = default;

private:
    std::vector<Complex> values_;
};

/// N FRFs of a common length.
class FrfSet {
public:
    FrfSet() = default;
    explicit FrfSet(std::vector<Frf> samples) : samples_(std::move(samples)) {
        for (std::size_t i = 1; i < samples_.size(); ++i)
            if (samples_[i].size() != samples_[0].size())
                throw DimensionMismatch("FRF #" + std::to_string(i + 1) + " has " +
                                        std::to_string(samples_[i].size()) +
                                        " components, expected " +
                                        std::to_string(samples_[0].size()));
    }

    const std::vector<Frf>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    /// Components per FRF (0 for an empty set).
    std::size_t length() const noexcept { return samples_.empty() ? 0 : samples_[0].size(); }
    const Frf& operator[](std::size_t i) const { return samples_[i]; }

    friend bool operator==(const FrfSet&, const FrfSet&) = default;

private:
    std::vector<Frf> samples_;
};

/// Pseudo-impulse response: a real signal over one period of the grid.
struct Pir {
    std::vector<double> values;
    double time_step = 0.0;
};

struct PirStats {
    std::vector<double> mean;
    std::vector<double> std;
};

/// Sampled cosine and sine of every grid frequency, n_samples x M.
///
/// Phases are reduced modulo one period in integer arithmetic,
/// 2*pi*((h_k * n) mod n_samples) / n_samples, so the tables stay accurate
/// for long periods.
class SinusoidBasis {
public:
    explicit SinusoidBasis(const FrequencyGrid& grid)
        : cos_(grid.n_samples(), grid.size()), sin_(grid.n_samples(), grid.size()) {
        const auto ns = static_cast<std::int64_t>(grid.n_samples());
        const double step = 2.0 * std::numbers::pi / static_cast<double>(ns);
        for (std::int64_t n = 0; n < ns; ++n) {
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const std::int64_t h = grid.harmonics()[k] % ns;
                const std::int64_t r = (h * n) % ns;
                const double phase = step * static_cast<double>(r);
                cos_(n, static_cast<Eigen::Index>(k)) = std::cos(phase);
                sin_(n, static_cast<Eigen::Index>(k)) = std::sin(phase);
            }
        }
    }

    const Eigen::MatrixXd& cos() const noexcept { return cos_; }
    const Eigen::MatrixXd& sin() const noexcept { return sin_; }

private:
    Eigen::MatrixXd cos_;
    Eigen::MatrixXd sin_;
};

namespace detail {

inline void require_aligned(const Frf& frf, const FrequencyGrid& grid) {
    if (frf.size() != grid.size())
        throw DimensionMismatch("FRF has " + std::to_string(frf.size()) +
                                " components but the grid has " +
                                std::to_string(grid.size()) + " frequencies");
}

inline void require_aligned(const FrfSet& set, const FrequencyGrid& grid) {
    if (!set.empty() && set.length() != grid.size())
        throw DimensionMismatch("FRF set has " + std::to_string(set.length()) +
                                " components per sample but the grid has " +
                                std::to_string(grid.size()) + " frequencies");
}

inline Eigen::VectorXd real_part(const Frf& frf) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(frf.size()));
    for (std::size_t k = 0; k < frf.size(); ++k) v(static_cast<Eigen::Index>(k)) = frf[k].real();
    return v;
}

inline Eigen::VectorXd imag_part(const Frf& frf) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(frf.size()));
    for (std::size_t k = 0; k < frf.size(); ++k) v(static_cast<Eigen::Index>(k)) = frf[k].imag();
    return v;
}

inline std::vector<double> to_std(const Eigen::Ref<const Eigen::VectorXd>& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace detail

/// x(t_n) = sum_k Re(H_k) cos(2 pi f_k t_n) + Im(H_k) sin(2 pi f_k t_n)
inline Pir pir_from_frf(const Frf& frf, const SinusoidBasis& basis, const FrequencyGrid& grid) {
    detail::require_aligned(frf, grid);
    const Eigen::VectorXd x =
        basis.cos() * detail::real_part(frf) + basis.sin() * detail::imag_part(frf);
    return Pir{detail::to_std(x), grid.time_step()};
}

inline Pir pir_from_frf(const Frf& frf, const FrequencyGrid& grid) {
    return pir_from_frf(frf, SinusoidBasis(grid), grid);
}

/// Projects a real signal back onto the grid frequencies. The 2/n_samples
/// normalisation makes this the exact inverse of pir_from_frf.
inline Frf frf_from_pir(std::span<const double> values, const SinusoidBasis& basis,
                        const FrequencyGrid& grid) {
    if (values.size() != grid.n_samples())
        throw DimensionMismatch("signal has " + std::to_string(values.size()) +
                                " samples but the grid period holds " +
                                std::to_string(grid.n_samples()));
    const Eigen::Map<const Eigen::VectorXd> x(values.data(),
                                              static_cast<Eigen::Index>(values.size()));
    const double scale = 2.0 / static_cast<double>(grid.n_samples());
    const Eigen::VectorXd re = scale * (basis.cos().transpose() * x);
    const Eigen::VectorXd im = scale * (basis.sin().transpose() * x);
    std::vector<Complex> out(grid.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = Complex(re(static_cast<Eigen::Index>(k)), im(static_cast<Eigen::Index>(k)));
    return Frf(std::move(out));
}

inline Frf frf_from_pir(std::span<const double> values, const FrequencyGrid& grid) {
    return frf_from_pir(values, SinusoidBasis(grid), grid);
}

inline Frf frf_from_pir(const Pir& pir, const FrequencyGrid& grid) {
    return frf_from_pir(std::span<const double>(pir.values), grid);
}

/// PIRs of a whole set, one per row.
inline CurveMatrix pir_matrix(const FrfSet& set, const FrequencyGrid& grid) {
    detail::require_aligned(set, grid);
    const SinusoidBasis basis(grid);
    const auto n = static_cast<Eigen::Index>(set.size());
    const auto m = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd re(n, m), im(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < m; ++k) {
            const Complex& h = set[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            re(i, k) = h.real();
            im(i, k) = h.imag();
        }
    CurveMatrix out = re * basis.cos().transpose() + im * basis.sin().transpose();
    return out;
}

/// Column-wise mean of the rows.
inline Eigen::RowVectorXd row_mean(const CurveMatrix& rows) {
    return rows.colwise().sum() / static_cast<double>(rows.rows());
}

/// Column-wise sample standard deviation (N - 1 divisor) around `mean`.
inline Eigen::RowVectorXd row_std(const CurveMatrix& rows, const Eigen::RowVectorXd& mean) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        acc.array() += (rows.row(i) - mean).array().square();
    return (acc / static_cast<double>(rows.rows() - 1)).array().sqrt();
}

/// Pointwise mean and standard deviation (N - 1 divisor) of the PIRs of a set.
inline PirStats pir_stats(const FrfSet& set, const FrequencyGrid& grid) {
    if (set.size() < 2)
        throw InvalidArgument("PIR statistics need at least 2 samples, got " +
                              std::to_string(set.size()));
    const CurveMatrix y = pir_matrix(set, grid);
    const Eigen::RowVectorXd mean = row_mean(y);
    const Eigen::RowVectorXd sd = row_std(y, mean);
    return PirStats{detail::to_std(mean.transpose()), detail::to_std(sd.transpose())};
}

/// Componentwise mean FRF.
inline Frf mean_frf(const FrfSet& set) {
    if (set.empty()) throw InvalidArgument("mean of an empty FRF set");
    std::vector<Complex> acc(set.length(), Complex(0.0, 0.0));
    for (const auto& frf : set.samples())
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += frf[k];
    for (auto& v : acc) v /= static_cast<double>(set.size());
    return Frf(std::move(acc));
}

}  // namespace frfstat
