#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "frfstat/frfstat.hpp"
#include "test_support.hpp"

using namespace frfstat;
using frfstat::test::posture_frequencies;

namespace {

FrfSet population(std::size_t n, std::uint64_t seed) {
    return generate_synthetic({lowpass_response(posture_frequencies()), 0.1, n, 1.0}, seed);
}

BootstrapConfig small_config(std::size_t b = 200, std::uint64_t seed = 5) {
    BootstrapConfig cfg;
    cfg.replications = b;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("pivot statistics match a straight-line oracle", "[bands]") {
    const FrequencyGrid g = derive_grid(std::vector<double>{0.5, 1.0});
    const FrfSet set({Frf({{1.0, 0.2}, {0.3, -0.5}}), Frf({{0.4, 0.9}, {-0.2, 0.1}}),
                      Frf({{-0.6, 0.1}, {0.9, 0.7}})});
    const std::vector<std::vector<std::size_t>> draws{{0, 0, 2}, {1, 2, 1}};
    test::TableSource src;
    for (std::size_t b = 0; b < draws.size(); ++b) src.set({Stream::band, b, 0, 0, 0}, draws[b]);

    BootstrapConfig cfg = small_config(2);
    ReplicateTrace trace;
    const BandAnalysis a = prediction_band_analysis(set, g, 0.5, cfg, src, &trace);
    const auto ref = test::straight_line_band(test::naive_pirs(set, g), draws);

    REQUIRE(a.statistics.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(a.statistics[i] - ref.stats[i]) < 1e-12);
    for (std::size_t b = 0; b < 2; ++b) {
        CHECK(trace.indices[b] == draws[b]);
        for (std::size_t t = 0; t < g.n_samples(); ++t) {
            CHECK(std::abs(trace.means[b][t] - ref.rep_means[b][t]) < 1e-12);
            CHECK(std::abs(trace.stds[b][t] - ref.rep_stds[b][t]) < 1e-12);
        }
    }
}

TEST_CASE("prediction_band basic behaviour", "[bands]") {
    const FrequencyGrid g = derive_grid(posture_frequencies());
    const FrfSet set = population(15, 1);
    const BootstrapConfig cfg = small_config();

    SECTION("alpha = 1 uses the largest statistic and contains every sample") {
        const BandAnalysis a = prediction_band_analysis(set, g, 1.0, cfg, SeededIndexSource{cfg.seed});
        CHECK(a.band.scale == *std::max_element(a.statistics.begin(), a.statistics.end()));
        const CurveMatrix y = pir_matrix(set, g);
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            for (Eigen::Index t = 0; t < y.cols(); ++t) {
                CHECK(y(i, t) <= a.band.upper[static_cast<std::size_t>(t)]);
                CHECK(y(i, t) >= a.band.lower[static_cast<std::size_t>(t)]);
            }
    }
    SECTION("band is symmetric about the mean") {
        const Band b = prediction_band(set, g, 0.9, cfg);
        CHECK(b.alpha == 0.9);
        for (std::size_t t = 0; t < b.mean.size(); ++t) {
            CHECK(b.upper[t] >= b.mean[t]);
            CHECK(b.mean[t] >= b.lower[t]);
            CHECK(std::abs((b.upper[t] - b.mean[t]) - (b.mean[t] - b.lower[t])) < 1e-12);
        }
    }
    SECTION("wider for larger alpha") {
        Band prev = prediction_band(set, g, 0.5, cfg);
        for (double alpha : {0.6, 0.8, 0.9, 0.95, 0.99}) {
            const Band b = prediction_band(set, g, alpha, cfg);
            for (std::size_t t = 0; t < b.mean.size(); ++t) CHECK(b.upper[t] >= prev.upper[t]);
            prev = b;
        }
    }
    SECTION("independent of the thread count") {
        BootstrapConfig threaded = cfg;
        threaded.threads = 4;
        const auto a = prediction_band_analysis(set, g, 0.95, cfg, SeededIndexSource{cfg.seed});
        const auto b = prediction_band_analysis(set, g, 0.95, threaded, SeededIndexSource{cfg.seed});
        CHECK(a.statistics == b.statistics);
        CHECK(a.band.upper == b.band.upper);
    }
}

TEST_CASE("prediction_band error paths", "[bands]") {
    const FrequencyGrid g = derive_grid(posture_frequencies());
    const BootstrapConfig cfg = small_config(20);

    CHECK_THROWS_AS(prediction_band(population(2, 1), g, 0.9, cfg), InvalidArgument);
    CHECK_THROWS_AS(prediction_band(population(5, 1), g, 1.5, cfg), InvalidArgument);
    CHECK_THROWS_AS(prediction_band(test::random_set(5, 3, 1), g, 0.9, cfg), DimensionMismatch);

    SECTION("identical samples have no spread") {
        const Frf one = population(1, 3)[0];
        CHECK_THROWS_AS(prediction_band(FrfSet(std::vector<Frf>(5, one)), g, 0.9, cfg), DegenerateSpread);
    }
    SECTION("a replication that keeps drawing one row is redrawn, then fails") {
        struct Stuck {
            std::vector<std::size_t> operator()(const DrawKey&, std::size_t n) const {
                return std::vector<std::size_t>(n, 0);
            }
        };
        CHECK_THROWS_AS(prediction_band_analysis(population(5, 2), g, 0.9, cfg, Stuck{}), DegenerateSpread);
    }
    SECTION("a degenerate first draw is replaced by the next attempt") {
        test::TableSource src;
        src.set({Stream::band, 0, 0, 0, 0}, {1, 1, 1});
        src.set({Stream::band, 0, 0, 0, 1}, {0, 1, 2});
        ReplicateTrace trace;
        prediction_band_analysis(population(3, 4), g, 0.9, small_config(1), src, &trace);
        CHECK(trace.indices[0] == std::vector<std::size_t>{0, 1, 2});
    }
}

TEST_CASE("minimal_prediction_band", "[bands]") {
    const FrequencyGrid g = derive_grid(posture_frequencies());
    const FrfSet set = population(20, 7);
    const BootstrapConfig cfg = small_config(300, 9);

    SECTION("the set mean has zero deviation") {
        const MinimalBand r = minimal_prediction_band(mean_frf(set), set, g, cfg);
        CHECK(r.band.scale == Catch::Approx(0.0).margin(1e-9));
        CHECK(r.alpha == 0.0);
    }
    SECTION("a far outlier is beyond every statistic") {
        std::vector<Complex> far(mean_frf(set).values());
        for (auto& h : far) h *= 1e6;
        const MinimalBand r = minimal_prediction_band(Frf(far), set, g, cfg);
        CHECK(r.alpha == 1.0);
    }
    SECTION("the test PIR touches but does not cross the band") {
        const Frf probe = population(1, 77)[0];
        const MinimalBand r = minimal_prediction_band(probe, set, g, cfg);
        const Pir x = pir_from_frf(probe, g);
        double worst = 0.0;
        for (std::size_t t = 0; t < x.values.size(); ++t) {
            worst = std::max(worst, std::abs(x.values[t] - r.band.mean[t]) / r.band.std[t]);
            CHECK(x.values[t] <= r.band.upper[t] + 1e-12);
            CHECK(x.values[t] >= r.band.lower[t] - 1e-12);
        }
        CHECK(worst == r.band.scale);
        const std::size_t p = r.peak_index;
        CHECK(std::min(std::abs(x.values[p] - r.band.upper[p]), std::abs(x.values[p] - r.band.lower[p])) < 1e-12);
    }
    SECTION("alpha is monotone in the deviation") {
        const Frf centre = mean_frf(set);
        const Frf probe = population(1, 78)[0];
        double prev_cp = -1.0, prev_alpha = -1.0;
        for (double s : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
            std::vector<Complex> h(centre.size());
            for (std::size_t k = 0; k < h.size(); ++k) h[k] = centre[k] + s * (probe[k] - centre[k]);
            const MinimalBand r = minimal_prediction_band(Frf(h), set, g, cfg);
            CHECK(r.band.scale >= prev_cp);
            CHECK(r.alpha >= prev_alpha);
            prev_cp = r.band.scale;
            prev_alpha = r.alpha;
        }
    }
    SECTION("alpha is the smallest level whose prediction band contains the test") {
        const Frf probe = population(1, 79)[0];
        const MinimalBand r = minimal_prediction_band(probe, set, g, cfg);
        const Band at = prediction_band(set, g, r.alpha, cfg);
        CHECK(at.scale >= r.band.scale);
        if (r.alpha >= 1e-3) {
            const Band below = prediction_band(set, g, r.alpha - 1e-3, cfg);
            CHECK(below.scale < r.band.scale);
        }
    }
    SECTION("misaligned test") {
        CHECK_THROWS_AS(minimal_prediction_band(Frf({1.0}), set, g, cfg), DimensionMismatch);
    }
}
