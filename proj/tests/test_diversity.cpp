#include "latentsearch/diversity.hpp"
#include "latentsearch/errors.hpp"
#include "latentsearch/evolve.hpp"
#include "latentsearch/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <string>

using namespace latentsearch;
using namespace std::chrono_literals;

namespace {

std::vector<LatentVector> normal_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    const auto dist = LatentDistribution::standard_normal(d);
    RandomStream rng(seed);
    std::vector<LatentVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(dist.sample_full(rng));
    }
    return out;
}

std::vector<RunTrace> always_accept_runs(double alpha, std::size_t d, std::uint64_t budget, std::size_t runs) {
    const auto dist = LatentDistribution::standard_normal(d);
    std::vector<RunTrace> traces;
    for (std::size_t seed = 0; seed < runs; ++seed) {
        AlwaysAcceptObjective objective(d);
        traces.push_back(evolve(objective, dist, EvolConfig{d, budget, alpha, seed, false}));
    }
    return traces;
}

} // namespace

TEST_CASE("identical points have zero diversity") {
    const std::vector<LatentVector> points(10, LatentVector({1.0, 2.0, 3.0}));
    EuclideanDistance metric;
    const auto report = random_pairing_diversity(points, metric, 4);
    CHECK(report.mean == 0.0);
    CHECK(report.standard_error == 0.0);
    CHECK(report.sample_size == 10);
    CHECK(report.metric == "euclidean-latent");
    CHECK(report.pairing_seed == 4);
}

TEST_CASE("two points at distance 1 pair with each other") {
    const std::vector<LatentVector> points{LatentVector({0.0, 0.0}), LatentVector({0.6, 0.8})};
    EuclideanDistance metric;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto report = random_pairing_diversity(points, metric, seed);
        CHECK(report.mean == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(report.standard_error == 0.0);
    }
}

TEST_CASE("fewer than two points or mixed lengths are rejected") {
    EuclideanDistance metric;
    const std::vector<LatentVector> one{LatentVector({1.0})};
    CHECK_THROWS_AS(random_pairing_diversity(one, metric, 0), ConfigError);
    CHECK_THROWS_AS(random_pairing_diversity(std::vector<LatentVector>{}, metric, 0), ConfigError);
    const std::vector<LatentVector> mixed{LatentVector({1.0}), LatentVector({1.0, 2.0})};
    CHECK_THROWS_AS(random_pairing_diversity(mixed, metric, 0), DimensionMismatch);
}

TEST_CASE("pairing is reproducible and never pairs a point with itself") {
    // Distinct points on a line: a zero distance would reveal a self-pairing.
    std::vector<LatentVector> points;
    for (int i = 0; i < 50; ++i) {
        points.push_back(LatentVector({static_cast<double>(i)}));
    }
    EuclideanDistance metric;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto a = random_pairing_diversity(points, metric, seed);
        REQUIRE(a == random_pairing_diversity(points, metric, seed));
    }
    struct Recorder final : DistanceMetric {
        std::string name() const override { return "recorder"; }
        double distance(std::span<const double> a, std::span<const double> b) override {
            REQUIRE(a[0] != b[0]);
            return std::abs(a[0] - b[0]);
        }
    } recorder;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        (void)random_pairing_diversity(points, recorder, seed);
    }
}

TEST_CASE("50,000 standard-normal points in d = 2 have mean pair distance sqrt(pi)") {
    // X - Y ~ N(0, 2 I_2), so ||X - Y|| is Rayleigh with scale sqrt(2): mean sqrt(2) sqrt(pi / 2) = sqrt(pi).
    const double expected = std::sqrt(std::numbers::pi);
    const auto points = normal_points(50000, 2, 1);
    EuclideanDistance metric;
    const auto report = random_pairing_diversity(points, metric, 2);
    CHECK(report.sample_size == 50000);
    CHECK(std::abs(report.mean - expected) <= 3.0 * report.standard_error);

    // Independent Monte Carlo: fresh independent pairs, distance computed by hand.
    RandomStream rng(99);
    constexpr int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = rng.standard_normal() - rng.standard_normal();
        const double dy = rng.standard_normal() - rng.standard_normal();
        const double dist = std::sqrt(dx * dx + dy * dy);
        sum += dist;
        sq += dist * dist;
    }
    const double mc_mean = sum / n;
    const double mc_se = std::sqrt((sq / n - mc_mean * mc_mean) / (n - 1));
    CHECK(std::abs(mc_mean - expected) <= 3.0 * mc_se);
    CHECK(std::abs(report.mean - mc_mean) <= 3.0 * std::hypot(report.standard_error, mc_se));
}

TEST_CASE("standard error is the sample standard deviation over sqrt(n)") {
    const auto points = normal_points(300, 3, 5);
    struct Logger final : DistanceMetric {
        std::vector<double> seen;
        std::string name() const override { return "logger"; }
        double distance(std::span<const double> a, std::span<const double> b) override {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                s += (a[i] - b[i]) * (a[i] - b[i]);
            }
            seen.push_back(std::sqrt(s));
            return seen.back();
        }
    } logger;
    const auto report = random_pairing_diversity(points, logger, 8);
    REQUIRE(logger.seen.size() == 300);
    double mean = 0.0;
    for (double x : logger.seen) {
        mean += x;
    }
    mean /= 300.0;
    double var = 0.0;
    for (double x : logger.seen) {
        var += (x - mean) * (x - mean);
    }
    var /= 299.0;
    CHECK(report.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(report.standard_error == doctest::Approx(std::sqrt(var / 300.0)).epsilon(1e-12));
}

TEST_CASE("metric properties") {
    EuclideanDistance euclid;
    NormalizedHammingDistance hamming;
    const auto points = normal_points(30, 6, 3);
    for (DistanceMetric* m : {static_cast<DistanceMetric*>(&euclid), static_cast<DistanceMetric*>(&hamming)}) {
        for (const auto& a : points) {
            CHECK(m->distance(a.values(), a.values()) == 0.0);
            for (const auto& b : points) {
                const double ab = m->distance(a.values(), b.values());
                CHECK(ab >= 0.0);
                CHECK(ab == m->distance(b.values(), a.values()));
            }
        }
    }
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{1, 0, 3, 0};
    CHECK(hamming.distance(x, y) == 0.5);
    CHECK(euclid.distance(x, y) == doctest::Approx(std::sqrt(20.0)));
    CHECK(make_metric("euclidean")->name() == "euclidean-latent");
    CHECK(make_metric("hamming")->name() == "normalized-hamming-latent");
    CHECK(make_metric("normalized-hamming-latent")->name() == "normalized-hamming-latent");
    CHECK_THROWS_AS(make_metric("cosine"), ConfigError);
}

TEST_CASE("external distance over the fake server") {
    auto metric = make_metric(std::string("external:'") + LATENTSEARCH_FAKE_SERVER + "' --dim 2 --mode distance");
    CHECK(metric->name() == "external-perceptual:fake-euclidean");
    const std::vector<double> a{0.0, 0.0};
    const std::vector<double> b{3.0, 4.0};
    CHECK(metric->distance(a, b) == 5.0);
    const std::vector<LatentVector> points{LatentVector(a), LatentVector(b)};
    const auto report = random_pairing_diversity(points, *metric, 0);
    CHECK(report.mean == 5.0);
    CHECK(report.metric == "external-perceptual:fake-euclidean");
}

TEST_CASE("drift statistics examples") {
    SUBCASE("single trace with no drift") {
        ConstantObjective objective(4, 0.0);
        const auto trace = evolve(objective, LatentDistribution::standard_normal(4), EvolConfig{4, 10, 1.0, 0, false});
        const std::vector<RunTrace> one{trace};
        const auto s = drift_statistics(one);
        CHECK(s.runs == 1);
        CHECK(s.mean_ratio == 0.0);
        CHECK(s.ratio_half_width == 0.0);
    }
    SUBCASE("hand-computed summary") {
        const std::vector<DriftSample> samples{{4, 0, 1}, {4, 2, 2}, {4, 4, 4}};
        const auto s = drift_statistics(samples);
        CHECK(s.mean_drift == 2.0);
        CHECK(s.mean_ratio == 0.5);
        CHECK(s.mean_mutated_union == doctest::Approx(7.0 / 3.0));
        // sample sd of {0, 2, 4} is 2; half-width 3 * 2 / sqrt(3).
        CHECK(s.drift_half_width == doctest::Approx(6.0 / std::sqrt(3.0)));
        CHECK(s.ratio_half_width == doctest::Approx(1.5 / std::sqrt(3.0)));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(drift_statistics(std::span<const DriftSample>{}), ConfigError);
        const std::vector<DriftSample> mixed{{4, 0, 0}, {5, 0, 0}};
        CHECK_THROWS_AS(drift_statistics(mixed), ConfigError);
    }
}

TEST_CASE("alpha = 0, d = 256, b = 40: drift ratio at most 40/256") {
    const auto s = drift_statistics(always_accept_runs(0.0, 256, 40, 1000));
    CHECK(s.runs == 1000);
    CHECK(s.mean_ratio <= 40.0 / 256.0);
    CHECK(s.mean_drift <= drift_bound(0.0, 256, 40) + s.drift_half_width);
}

TEST_CASE("alpha = inf with continuous marginals drifts on every coordinate") {
    for (std::uint64_t budget : {8ULL, 20ULL}) {
        const auto s = drift_statistics(always_accept_runs(kInfiniteAlpha, 64, budget, 1000));
        CHECK(s.mean_ratio >= 0.99);
    }
}

TEST_CASE("drift bound formula") {
    CHECK(drift_bound(0.0, 256, 40) == 40.0);
    CHECK(drift_bound(1.0 / 256.0, 256, 40) == 40.0);
    CHECK(drift_bound(0.1, 256, 40) == 256.0);
    CHECK(drift_bound(0.01, 256, 40) == doctest::Approx(102.4));
    CHECK(drift_bound(kInfiniteAlpha, 256, 40) == 256.0);
    CHECK(drift_bound(0.0, 8, 200) == 8.0);
}

TEST_CASE("final-point diversity on a fixed sphere: alpha = 0 keeps more diversity than alpha = inf") {
    Campaign campaign;
    campaign.name = "diversity-ordering";
    campaign.objective = ObjectiveSpec::from_json({{"kind", "sphere"}, {"target_seed", 1}});
    campaign.dimensions = {256};
    campaign.budgets = {40};
    campaign.alphas = {0.0, 1.0, kInfiniteAlpha};
    campaign.replicas = 500;
    campaign.base_seed = 2020;
    campaign.diversity = DiversitySettings{"euclidean-latent", 7};
    const auto report = run_campaign(campaign, 8);
    REQUIRE(report.cells.size() == 3);
    const auto& d0 = *report.cells[0].diversity;
    const auto& d1 = *report.cells[1].diversity;
    const auto& dinf = *report.cells[2].diversity;
    MESSAGE(std::setprecision(17) << "alpha=0: " << d0.mean << " +- " << d0.standard_error);
    MESSAGE(std::setprecision(17) << "alpha=1: " << d1.mean << " +- " << d1.standard_error);
    MESSAGE(std::setprecision(17) << "alpha=inf: " << dinf.mean << " +- " << dinf.standard_error);
    CHECK(d0.mean > dinf.mean);

    // Regression values measured with the reference stream (base seed 2020,
    // target seed 1, pairing seed 7). The alpha = 1 chain gets closest to the
    // target, so its final points are the least spread of the three.
    CHECK(d0.mean == doctest::Approx(22.117661771025876).epsilon(1e-9));
    CHECK(d1.mean == doctest::Approx(20.735486839254023).epsilon(1e-9));
    CHECK(dinf.mean == doctest::Approx(21.268062232483562).epsilon(1e-9));
    CHECK(d0.standard_error == doctest::Approx(0.043263427870916027).epsilon(1e-6));
}
