#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "frfstat/errors.hpp"
#include "frfstat/random.hpp"
#include "frfstat/signal.hpp"

namespace frfstat {

/// Population model for calibration experiments: a mean FRF scaled by a
/// gain, plus isotropic complex Gaussian noise.
struct SyntheticSpec {
    Frf mean_frf;
    double noise_std = 0.0;  ///< per real and per imaginary component
    std::size_t n = 1;
    double gain_factor = 1.0;

    void validate() const {
        if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
            throw InvalidArgument("noise std must be finite and >= 0");
        if (n < 1) throw InvalidArgument("synthetic sample count must be >= 1");
        if (!(gain_factor > 0.0) || !std::isfinite(gain_factor))
            throw InvalidArgument("gain factor must be finite and > 0");
    }
};

/// H_i = gain * mean + eps_i with eps components iid N(0, noise_std^2).
inline FrfSet generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    RngStream rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Frf> out;
    out.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        std::vector<Complex> h(spec.mean_frf.size());
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double re = noise(rng);
            const double im = noise(rng);
            h[k] = spec.gain_factor * spec.mean_frf[k] + spec.noise_std * Complex(re, im);
        }
        out.emplace_back(std::move(h));
    }
    return FrfSet(std::move(out));
}

/// First-order low-pass with a transport delay,
/// H(f) = gain * exp(-i 2 pi f delay) / (1 + i f / corner).
/// Roughly the shape of a sway-versus-tilt response.
inline Frf lowpass_response(std::span<const double> frequencies, double gain = 1.0,
                            double corner_hz = 0.8, double delay_s = 0.15) {
    std::vector<Complex> h(frequencies.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double f = frequencies[k];
        const Complex lag = std::polar(1.0, -2.0 * std::numbers::pi * f * delay_s);
        h[k] = gain * lag / Complex(1.0, f / corner_hz);
    }
    return Frf(std::move(h));
}

}  // namespace frfstat
