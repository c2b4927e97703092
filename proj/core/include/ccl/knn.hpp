#ifndef CCL_KNN_HPP_
#define CCL_KNN_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <ccl/feature_set.hpp>

namespace ccl {

/// Exact k-nearest-neighbor lists for every point, sorted by ascending
/// (distance, id). Neighbor slots are row indices into the originating
/// FeatureSet.
struct KnnResult {
    int k = 0;
    std::vector<std::int32_t> neighbors; // m*k row indices
    std::vector<double> distances;       // m*k Euclidean distances

    std::span<const std::int32_t> neighbor_row(Eigen::Index i) const {
        return {neighbors.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
    }
    std::span<const double> distance_row(Eigen::Index i) const {
        return {distances.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
    }
};

/// Default neighbor count: round(4 ln m), clamped to [1, m-1].
/// Throws InvalidParameterError for m < 2.
int default_k(std::int64_t m);

/// Exact brute-force kNN under the Euclidean metric, ties broken by
/// ascending id. Internally parallelized over source blocks; the output is
/// byte-identical regardless of thread count. Requires 1 <= k < m.
KnnResult pairwise_knn(const FeatureSet &features, int k);

} // namespace ccl

#endif // CCL_KNN_HPP_
