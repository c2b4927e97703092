#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include <ccl/centrality.hpp>
#include <ccl/feature_set.hpp>
#include <ccl/geometry.hpp>
#include <ccl/graph.hpp>
#include <ccl/knn.hpp>
#include <ccl/rng.hpp>
#include <ccl/simulation.hpp>

namespace {

ccl::FeatureSet standard_cloud(Eigen::Index m, Eigen::Index d, std::uint64_t seed) {
    ccl::RowMatrixF points(m, d);
    ccl::Rng rng(seed);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            points(i, j) = static_cast<float>(rng.normal());
        }
    }
    return ccl::FeatureSet(std::move(points));
}

ccl::WeightedDigraph standard_graph(const ccl::FeatureSet &cloud) {
    const ccl::KnnResult knn = ccl::pairwise_knn(cloud, ccl::default_k(cloud.size()));
    return ccl::build_digraph(cloud, knn, ccl::calibrate_sigma(knn));
}

void BM_PairwiseKnn(benchmark::State &state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto d = static_cast<Eigen::Index>(state.range(1));
    const ccl::FeatureSet cloud = standard_cloud(m, d, 1);
    const int k = ccl::default_k(m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccl::pairwise_knn(cloud, k));
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_PairwiseKnn)->Args({2000, 64})->Args({8000, 64})->Args({8000, 512})
    ->Unit(benchmark::kMillisecond);

void BM_StationaryCentrality(benchmark::State &state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const ccl::FeatureSet cloud = standard_cloud(m, 16, 2);
    const ccl::WeightedDigraph graph = standard_graph(cloud);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccl::stationary_centrality(graph));
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_StationaryCentrality)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_FitEllipsoid(benchmark::State &state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto d = static_cast<Eigen::Index>(state.range(1));
    const ccl::FeatureSet cloud = standard_cloud(m, d, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccl::fit_ellipsoid(cloud));
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_FitEllipsoid)->Args({20000, 128})->Args({20000, 512})
    ->Unit(benchmark::kMillisecond);

void BM_MahalanobisNorms(benchmark::State &state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const auto d = static_cast<Eigen::Index>(state.range(1));
    const ccl::FeatureSet cloud = standard_cloud(m, d, 4);
    const ccl::EllipsoidSummary summary = ccl::fit_ellipsoid(cloud);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccl::mahalanobis_norms(cloud, summary));
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_MahalanobisNorms)->Args({20000, 128})->Args({20000, 512})
    ->Unit(benchmark::kMillisecond);

void BM_PercolationCurve(benchmark::State &state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    const ccl::FeatureSet cloud = standard_cloud(m, 64, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccl::percolation_curve(cloud));
    }
    state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_PercolationCurve)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_FrechetDistance(benchmark::State &state) {
    const auto d = static_cast<Eigen::Index>(state.range(0));
    ccl::Rng rng(6);
    Eigen::MatrixXd a(d, d);
    Eigen::MatrixXd b(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            a(i, j) = rng.normal();
            b(i, j) = rng.normal();
        }
    }
    ccl::GaussianMoments lhs{Eigen::VectorXd::Zero(d),
                             a * a.transpose() + Eigen::MatrixXd::Identity(d, d)};
    ccl::GaussianMoments rhs{Eigen::VectorXd::Ones(d),
                             b * b.transpose() + Eigen::MatrixXd::Identity(d, d)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ccl::frechet_distance(lhs, rhs));
    }
}
BENCHMARK(BM_FrechetDistance)->Arg(16)->Arg(256)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
