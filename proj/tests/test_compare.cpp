#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "frfstat/frfstat.hpp"
#include "test_support.hpp"

using namespace frfstat;
using frfstat::test::posture_frequencies;

namespace {

FrfSet population(std::size_t n, std::uint64_t seed, double gain = 1.0, double noise = 0.1) {
    return generate_synthetic({lowpass_response(posture_frequencies()), noise, n, gain}, seed);
}

BootstrapConfig config(std::size_t b, std::size_t bs, std::uint64_t seed = 13) {
    BootstrapConfig cfg;
    cfg.replications = b;
    cfg.nested_replications = bs;
    cfg.seed = seed;
    return cfg;
}

Band band_of(std::vector<double> lower, std::vector<double> upper) {
    Band b;
    b.lower = std::move(lower);
    b.upper = std::move(upper);
    b.mean.resize(b.lower.size());
    for (std::size_t t = 0; t < b.mean.size(); ++t) b.mean[t] = 0.5 * (b.lower[t] + b.upper[t]);
    return b;
}

}  // namespace

TEST_CASE("compare_unpaired matches a straight-line oracle", "[compare]") {
    const FrequencyGrid g = derive_grid(std::vector<double>{0.5, 1.0});
    const FrfSet s1 = test::random_set(3, 2, 71);
    const FrfSet s2 = test::random_set(4, 2, 72);

    test::CompareDraws d;
    d.sigma = {{{{0, 1, 1}, {3, 2, 0, 0}}}, {{{2, 2, 0}, {1, 1, 3, 2}}}};
    d.outer = {{{{0, 1, 2}, {0, 1, 2, 3}}}, {{{2, 0, 0}, {3, 3, 1, 0}}}};
    d.nested = {{{{{0, 0, 1}, {1, 2, 3, 3}}}, {{{2, 1, 2}, {0, 0, 1, 2}}}},
                {{{{1, 2, 0}, {2, 0, 3, 1}}}, {{{0, 0, 0}, {3, 3, 3, 1}}}}};
    const auto src = d.source();

    CompareTrace trace;
    const ComparisonResult r = compare_unpaired(s1, s2, g, 0.5, config(2, 2), src, {}, &trace);
    const auto ref = test::straight_line_compare(test::naive_pirs(s1, g), test::naive_pirs(s2, g), d);

    for (std::size_t t = 0; t < g.n_samples(); ++t) {
        CHECK(std::abs(r.diff_mean[t] - ref.diff[t]) < 1e-12);
        CHECK(std::abs(r.sigma[t] - ref.sigma[t]) < 1e-12);
    }
    REQUIRE(r.statistics.size() == 2);
    for (std::size_t b = 0; b < 2; ++b) {
        CHECK(std::abs(r.statistics[b] - ref.stats[b]) < 1e-12);
        CHECK(trace.indices[0][b] == d.outer[b][0]);
        CHECK(trace.indices[1][b] == d.outer[b][1]);
        for (std::size_t t = 0; t < g.n_samples(); ++t) {
            CHECK(std::abs(trace.means[b][t] - ref.rep_means[b][t]) < 1e-12);
            CHECK(std::abs(trace.stds[b][t] - ref.rep_stds[b][t]) < 1e-12);
        }
    }
    const double cu = r.band.scale;
    CHECK(cu == c_at(r.ecdf, 0.5));
    for (std::size_t t = 0; t < g.n_samples(); ++t) {
        CHECK(std::abs(r.band.upper[t] - (ref.diff[t] + cu * ref.sigma[t])) < 1e-12);
        CHECK(std::abs(r.band.lower[t] - (ref.diff[t] - cu * ref.sigma[t])) < 1e-12);
    }
}

TEST_CASE("residuals of a band", "[compare]") {
    SECTION("a band straddling zero everywhere has no residual") {
        const auto r = residuals(band_of({-1.0, -0.5, 0.0}, {1.0, 0.5, 0.0}));
        CHECK(r == std::vector<double>{0.0, 0.0, 0.0});
    }
    SECTION("a band above zero returns its lower envelope") {
        const auto r = residuals(band_of({1.0, 1.0, 1.0}, {2.0, 3.0, 4.0}));
        CHECK(r == std::vector<double>{1.0, 1.0, 1.0});
    }
    SECTION("mixed band matches a pointwise rule") {
        RngStream rng(3);
        std::vector<double> lo(200), hi(200);
        for (std::size_t t = 0; t < lo.size(); ++t) {
            const double c = 4.0 * rng.uniform() - 2.0, w = rng.uniform();
            lo[t] = c - w;
            hi[t] = c + w;
        }
        const auto r = residuals(band_of(lo, hi));
        for (std::size_t t = 0; t < lo.size(); ++t) {
            double expected = 0.0;
            if (lo[t] > 0.0) expected = lo[t];
            if (hi[t] < 0.0) expected = hi[t];
            CHECK(r[t] == expected);
        }
    }
    SECTION("residual FRF of a cosine at one grid frequency") {
        const FrequencyGrid g = derive_grid(posture_frequencies());
        std::vector<double> x(g.n_samples());
        for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::cos(2.0 * std::numbers::pi * 0.55 * g.time(n));
        const Frf h = residual_frf(x, g);
        for (std::size_t k = 0; k < h.size(); ++k)
            CHECK(std::abs(h[k]) == Catch::Approx(g.frequencies()[k] == 0.55 ? 1.0 : 0.0).margin(1e-9));
        CHECK(std::abs(residual_frf(std::vector<double>(g.n_samples(), 0.0), g)[0]) == 0.0);
    }
}

TEST_CASE("compare_unpaired properties", "[compare][property]") {
    const FrequencyGrid g = derive_grid(posture_frequencies());
    const FrfSet a = population(12, 81);
    const FrfSet b = population(15, 82, 1.3);
    const BootstrapConfig cfg = config(60, 12);

    SECTION("a set compared with itself has zero difference and is accepted") {
        const ComparisonResult r = compare_unpaired(a, a, g, 0.95, cfg);
        for (double v : r.diff_mean) CHECK(v == 0.0);
        for (double v : r.residuals) CHECK(v == 0.0);
        CHECK_FALSE(r.reject_null);
        CHECK(r.statistics.size() == cfg.replications);
    }
    SECTION("swapping the groups negates the difference") {
        const SeededIndexSource src{cfg.seed};
        const ComparisonResult ab = compare_unpaired(a, b, g, 0.9, cfg, src);
        const ComparisonResult ba = compare_unpaired(b, a, g, 0.9, cfg, src, CompareOptions{{1, 0}});
        CHECK(ab.statistics == ba.statistics);
        CHECK(ab.reject_null == ba.reject_null);
        for (std::size_t t = 0; t < ab.diff_mean.size(); ++t) {
            CHECK(ab.diff_mean[t] == -ba.diff_mean[t]);
            CHECK(ab.sigma[t] == Catch::Approx(ba.sigma[t]).epsilon(1e-12));
            CHECK(ab.residuals[t] == Catch::Approx(-ba.residuals[t]).margin(1e-12));
        }
    }
    SECTION("adding one FRF to every member of both groups changes nothing") {
        const Frf shift = test::random_set(1, g.size(), 83)[0];
        auto shifted = [&](const FrfSet& s) {
            std::vector<Frf> out;
            for (const auto& frf : s.samples()) {
                std::vector<Complex> h(frf.values());
                for (std::size_t k = 0; k < h.size(); ++k) h[k] += shift[k];
                out.emplace_back(std::move(h));
            }
            return FrfSet(out);
        };
        const ComparisonResult r0 = compare_unpaired(a, b, g, 0.9, cfg);
        const ComparisonResult r1 = compare_unpaired(shifted(a), shifted(b), g, 0.9, cfg);
        for (std::size_t t = 0; t < r0.diff_mean.size(); ++t) {
            CHECK(std::abs(r0.diff_mean[t] - r1.diff_mean[t]) < 1e-12);
            CHECK(std::abs(r0.sigma[t] - r1.sigma[t]) < 1e-12);
        }
        for (std::size_t i = 0; i < r0.statistics.size(); ++i)
            CHECK(r0.statistics[i] == Catch::Approx(r1.statistics[i]).epsilon(1e-9));
    }
    SECTION("a large gain difference is rejected") {
        const ComparisonResult r = compare_unpaired(a, population(12, 84, 2.0), g, 0.95, cfg);
        CHECK(r.reject_null);
        CHECK(std::any_of(r.residuals.begin(), r.residuals.end(), [](double v) { return v != 0.0; }));
    }
    SECTION("independent of the thread count") {
        BootstrapConfig threaded = cfg;
        threaded.threads = 3;
        const ComparisonResult r0 = compare_unpaired(a, b, g, 0.9, cfg);
        const ComparisonResult r1 = compare_unpaired(a, b, g, 0.9, threaded);
        CHECK(r0.statistics == r1.statistics);
        CHECK(r0.band.upper == r1.band.upper);
    }
}

TEST_CASE("compare_unpaired error paths", "[compare]") {
    const FrequencyGrid g = derive_grid(posture_frequencies());
    const BootstrapConfig cfg = config(10, 5);
    const FrfSet a = population(5, 91);
    CHECK_THROWS_AS(compare_unpaired(a, population(2, 92), g, 0.9, cfg), InvalidArgument);
    CHECK_THROWS_AS(compare_unpaired(a, test::random_set(5, 3, 93), g, 0.9, cfg), DimensionMismatch);
    CHECK_THROWS_AS(compare_unpaired(a, a, g, -0.1, cfg), InvalidArgument);
    const FrequencyGrid other = derive_grid(std::vector<double>{0.5, 1.0});
    CHECK_THROWS_AS(compare_unpaired(a, a, other, 0.9, cfg), DimensionMismatch);
}
