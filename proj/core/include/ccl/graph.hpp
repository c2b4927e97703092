#ifndef CCL_GRAPH_HPP_
#define CCL_GRAPH_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <ccl/feature_set.hpp>
#include <ccl/knn.hpp>

namespace ccl {

/// Directed kNN graph with Gaussian edge weights w = exp(-d^2 / sigma^2).
/// Edge slots are row-major (node-major) and parallel to the KnnResult the
/// graph was built from; targets hold row indices, ids the point ids.
struct WeightedDigraph {
    int k = 0;
    double sigma = 0.0;
    std::vector<std::int64_t> ids;       // m point ids, row order
    std::vector<std::int32_t> targets;   // m*k neighbor row indices
    std::vector<double> distances;       // m*k Euclidean distances
    std::vector<double> weights;         // m*k edge weights in (0, 1]

    Eigen::Index size() const { return static_cast<Eigen::Index>(ids.size()); }

    std::span<const std::int32_t> target_row(Eigen::Index i) const {
        return {targets.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
    }
    std::span<const double> weight_row(Eigen::Index i) const {
        return {weights.data() + static_cast<std::size_t>(i) * k, static_cast<std::size_t>(k)};
    }
};

/// Bandwidth that makes the geometric mean of all edge weights equal to
/// target_geomean: sigma = sqrt(mean(d^2) / -ln(target)). Requires
/// 0 < target_geomean < 1; throws DegenerateInputError when every neighbor
/// distance is zero.
double calibrate_sigma(const KnnResult &knn, double target_geomean = 0.8);

/// Attaches Gaussian weights exp(-d^2 / sigma^2) to the kNN edges.
WeightedDigraph build_digraph(const FeatureSet &features, const KnnResult &knn, double sigma);

} // namespace ccl

#endif // CCL_GRAPH_HPP_
