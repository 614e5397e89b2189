#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frfstat/errors.hpp"

namespace frfstat {

/// Non-uniform set of analysis frequencies together with the sampling of
/// one period of the signal they span.
///
/// Every frequency is an integer multiple (harmonic) of base_frequency().
/// The time grid is t_n = n / sample_rate for n in [0, n_samples), which
/// covers exactly one period, so the sampled sinusoids are orthogonal.
class FrequencyGrid {
public:
    const std::vector<double>& frequencies() const noexcept { return frequencies_; }
    /// frequencies()[k] == harmonics()[k] * base_frequency()
    const std::vector<std::int64_t>& harmonics() const noexcept { return harmonics_; }
    std::size_t size() const noexcept { return frequencies_.size(); }

    double base_frequency() const noexcept { return base_frequency_; }
    double period() const noexcept { return period_; }
    double sample_rate() const noexcept { return sample_rate_; }
    double time_step() const noexcept { return 1.0 / sample_rate_; }
    std::size_t n_samples() const noexcept { return n_samples_; }

    double time(std::size_t n) const noexcept {
        return static_cast<double>(n) / sample_rate_;
    }

    /// Same frequencies and same sampling.
    bool same_as(const FrequencyGrid& other) const noexcept {
        return harmonics_ == other.harmonics_ && n_samples_ == other.n_samples_ &&
               base_frequency_ == other.base_frequency_;
    }

    friend FrequencyGrid derive_grid(std::span<const double> frequencies,
                                     std::optional<double> sample_rate);

private:
    FrequencyGrid() = default;

    std::vector<double> frequencies_;
    std::vector<std::int64_t> harmonics_;
    double base_frequency_ = 0.0;
    double period_ = 0.0;
    double sample_rate_ = 0.0;
    std::size_t n_samples_ = 0;
};

namespace detail {

inline constexpr std::int64_t kMaxDenominator = 1'000'000;
inline constexpr double kCommensurabilityTolerance = 1e-9;
inline constexpr std::size_t kMaxSamples = 100'000'000;

}  // namespace detail

/// Builds a grid from analysis frequencies in Hz.
///
/// The base frequency is the exact rational gcd of the inputs: the smallest
/// denominator d <= 10^6 that turns every frequency into an integer (within a
/// relative tolerance of 1e-9) is searched, then the integer gcd is taken.
/// Without an explicit rate the sample rate is ten times the highest
/// frequency. The rate is then reconciled to n_samples * base_frequency.
inline FrequencyGrid derive_grid(std::span<const double> frequencies,
                                 std::optional<double> sample_rate = std::nullopt) {
    if (frequencies.empty()) throw GridError("frequency list is empty");
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        const double f = frequencies[k];
        if (!std::isfinite(f) || f <= 0.0)
            throw GridError("frequency #" + std::to_string(k + 1) + " must be finite and > 0");
        if (k > 0 && !(f > frequencies[k - 1]))
            throw GridError("frequencies must be strictly increasing (index " +
                            std::to_string(k + 1) + ")");
    }

    std::int64_t denominator = 0;
    std::vector<std::int64_t> scaled(frequencies.size());
    for (std::int64_t d = 1; d <= detail::kMaxDenominator && denominator == 0; ++d) {
        bool ok = true;
        for (std::size_t k = 0; k < frequencies.size() && ok; ++k) {
            const double x = frequencies[k] * static_cast<double>(d);
            if (x > 9.0e15) {
                ok = false;
                break;
            }
            const double r = std::round(x);
            ok = r >= 1.0 && std::abs(x - r) <= detail::kCommensurabilityTolerance * x;
            scaled[k] = static_cast<std::int64_t>(r);
        }
        if (ok) denominator = d;
    }
    if (denominator == 0)
        throw NonCommensurableFrequencies(
            "frequencies have no common rational base with denominator <= 1e6");

    std::int64_t g = 0;
    for (auto s : scaled) g = std::gcd(g, s);

    FrequencyGrid grid;
    grid.frequencies_.assign(frequencies.begin(), frequencies.end());
    grid.harmonics_.resize(scaled.size());
    std::transform(scaled.begin(), scaled.end(), grid.harmonics_.begin(),
                   [g](std::int64_t s) { return s / g; });
    grid.base_frequency_ = static_cast<double>(g) / static_cast<double>(denominator);
    grid.period_ = static_cast<double>(denominator) / static_cast<double>(g);

    const double f_max = frequencies.back();
    const double rate = sample_rate.value_or(10.0 * f_max);
    if (!std::isfinite(rate) || rate <= 2.0 * f_max)
        throw NyquistViolation("sample rate " + std::to_string(rate) +
                               " Hz must exceed twice the highest frequency (" +
                               std::to_string(2.0 * f_max) + " Hz)");

    const double n = std::round(grid.period_ * rate);
    if (n > static_cast<double>(detail::kMaxSamples))
        throw GridError("period x sample rate gives too many samples");
    grid.n_samples_ = static_cast<std::size_t>(n);
    // Reconciled rate must still leave every harmonic strictly below Nyquist.
    if (static_cast<std::int64_t>(grid.n_samples_) <= 2 * grid.harmonics_.back())
        throw NyquistViolation("sample rate too close to twice the highest frequency "
                               "after rounding to a whole number of samples per period");
    grid.sample_rate_ = static_cast<double>(grid.n_samples_) * grid.base_frequency_;
    return grid;
}

inline FrequencyGrid derive_grid(const std::vector<double>& frequencies,
                                 std::optional<double> sample_rate = std::nullopt) {
    return derive_grid(std::span<const double>(frequencies), sample_rate);
}

}  // namespace frfstat
