#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <ccl/errors.hpp>
#include <ccl/feature_set.hpp>
#include <ccl/graph.hpp>
#include <ccl/knn.hpp>

#include "support/helpers.hpp"

using ccl::FeatureSet;
using ccl::KnnResult;
using ccl::RowMatrixF;
using ccl::WeightedDigraph;

TEST_SUITE("graph") {

TEST_CASE("calibrate_sigma hits the requested geometric mean exactly") {
    const FeatureSet cloud = ccl::tests::gaussian_cloud(150, 6, 42);
    const KnnResult knn = ccl::pairwise_knn(cloud, 8);

    for (const double target : {0.5, 0.8, 0.95}) {
        CAPTURE(target);
        const double sigma = ccl::calibrate_sigma(knn, target);
        REQUIRE(sigma > 0.0);

        const WeightedDigraph graph = ccl::build_digraph(cloud, knn, sigma);
        double log_sum = 0.0;
        for (const double w : graph.weights) {
            log_sum += std::log(w);
        }
        const double geomean = std::exp(log_sum / static_cast<double>(graph.weights.size()));
        CHECK(geomean == doctest::Approx(target).epsilon(1e-12));
    }
}

TEST_CASE("calibrate_sigma matches the closed form sqrt(mean d^2 / -ln target)") {
    RowMatrixF points(3, 1);
    points << 0.0F, 1.0F, 3.0F;
    const FeatureSet features(std::move(points));
    const KnnResult knn = ccl::pairwise_knn(features, 1);

    // nearest-neighbor distances: 1 (0->1), 1 (1->0), 2 (2->1)
    const double mean_sq = (1.0 + 1.0 + 4.0) / 3.0;
    const double expected = std::sqrt(mean_sq / -std::log(0.8));
    CHECK(ccl::calibrate_sigma(knn, 0.8) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("calibrate_sigma validates the target range") {
    const FeatureSet cloud = ccl::tests::gaussian_cloud(10, 2, 3);
    const KnnResult knn = ccl::pairwise_knn(cloud, 3);

    CHECK_THROWS_AS(ccl::calibrate_sigma(knn, 0.0), ccl::InvalidParameterError);
    CHECK_THROWS_AS(ccl::calibrate_sigma(knn, 1.0), ccl::InvalidParameterError);
    CHECK_THROWS_AS(ccl::calibrate_sigma(knn, -0.5), ccl::InvalidParameterError);
    CHECK_THROWS_AS(ccl::calibrate_sigma(knn, 1.5), ccl::InvalidParameterError);
}

TEST_CASE("all-zero neighbor distances cannot be calibrated") {
    RowMatrixF points(3, 2);
    points << 2.0F, 2.0F, 2.0F, 2.0F, 2.0F, 2.0F;
    const FeatureSet features(std::move(points));
    const KnnResult knn = ccl::pairwise_knn(features, 2);

    CHECK_THROWS_AS(ccl::calibrate_sigma(knn, 0.8), ccl::DegenerateInputError);
}

TEST_CASE("build_digraph applies w = exp(-d^2 / sigma^2) edge by edge") {
    const FeatureSet cloud = ccl::tests::gaussian_cloud(60, 4, 9);
    const KnnResult knn = ccl::pairwise_knn(cloud, 5);
    const double sigma = 1.7;

    const WeightedDigraph graph = ccl::build_digraph(cloud, knn, sigma);

    REQUIRE(graph.k == 5);
    REQUIRE(graph.sigma == sigma);
    REQUIRE(graph.size() == 60);
    REQUIRE(graph.targets.size() == 60 * 5);
    REQUIRE(graph.weights.size() == 60 * 5);
    for (std::size_t slot = 0; slot < graph.weights.size(); ++slot) {
        REQUIRE(graph.targets[slot] == knn.neighbors[slot]);
        REQUIRE(graph.distances[slot] == knn.distances[slot]);
        const double d = knn.distances[slot];
        const double expected = std::exp(-d * d / (sigma * sigma));
        REQUIRE(graph.weights[slot] == doctest::Approx(expected).epsilon(1e-15));
        REQUIRE(graph.weights[slot] > 0.0);
        REQUIRE(graph.weights[slot] <= 1.0);
    }
}

TEST_CASE("graph carries point ids in row order") {
    RowMatrixF points(3, 1);
    points << 0.0F, 1.0F, 3.0F;
    const FeatureSet features(std::move(points), {31, 41, 59});
    const KnnResult knn = ccl::pairwise_knn(features, 1);

    const WeightedDigraph graph = ccl::build_digraph(features, knn, 1.0);

    CHECK(graph.ids == std::vector<std::int64_t>{31, 41, 59});
    CHECK(graph.target_row(2)[0] == 1);
    CHECK(graph.weight_row(2)[0] == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("build_digraph rejects a nonpositive sigma") {
    const FeatureSet cloud = ccl::tests::gaussian_cloud(10, 2, 21);
    const KnnResult knn = ccl::pairwise_knn(cloud, 2);

    CHECK_THROWS_AS(ccl::build_digraph(cloud, knn, 0.0), ccl::InvalidParameterError);
    CHECK_THROWS_AS(ccl::build_digraph(cloud, knn, -1.0), ccl::InvalidParameterError);
}

} // TEST_SUITE
