#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace frfstat {

/// xoshiro256** seeded through splitmix64. Small state, cheap to construct,
/// so a fresh generator can be made for every bootstrap replication.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed) noexcept {
        for (auto& s : state_) s = splitmix64(seed);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift
    /// with rejection, so no modulo bias).
    std::uint64_t below(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// Which bootstrap loop a draw belongs to.
enum class Stream : std::uint64_t {
    band = 1,
    density = 2,
    compare_sigma = 3,
    compare_outer = 4,
    compare_nested = 5,
};

/// Coordinates of one resample draw. A seeded source maps (seed, key) to an
/// independent substream, so results never depend on execution order.
struct DrawKey {
    Stream stream = Stream::band;
    std::uint64_t replicate = 0;
    std::uint64_t nested = 0;
    std::uint64_t group = 0;
    std::uint64_t attempt = 0;
};

/// Derives the generator for one draw from the run seed and its key.
inline RngStream substream(std::uint64_t seed, const DrawKey& key) noexcept {
    std::uint64_t x = seed;
    std::uint64_t h = RngStream::splitmix64(x);
    for (std::uint64_t part : {static_cast<std::uint64_t>(key.stream), key.replicate, key.nested,
                               key.group, key.attempt}) {
        x = h ^ (part + 0x632be59bd9b4e019ULL);
        h = RngStream::splitmix64(x);
    }
    return RngStream(h);
}

/// n indices drawn uniformly with replacement from [0, n).
inline std::vector<std::size_t> resample_indices(std::size_t n, RngStream& stream) {
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(stream.below(n));
    return idx;
}

/// Anything that yields bootstrap index vectors for a given draw. Tests
/// inject fixed tables through this; production code uses SeededIndexSource.
template <class S>
concept IndexSource = requires(const S& s, const DrawKey& key, std::size_t n) {
    { s(key, n) } -> std::convertible_to<std::vector<std::size_t>>;
};

struct SeededIndexSource {
    std::uint64_t seed = 0;

    std::vector<std::size_t> operator()(const DrawKey& key, std::size_t n) const {
        RngStream rng = substream(seed, key);
        return resample_indices(n, rng);
    }
};

}  // namespace frfstat
