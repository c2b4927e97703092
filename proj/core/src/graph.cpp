#include <ccl/graph.hpp>

#include <cmath>
#include <string>

#include <ccl/errors.hpp>

namespace ccl {

double calibrate_sigma(const KnnResult &knn, double target_geomean) {
    if (!(target_geomean > 0.0 && target_geomean < 1.0))
        throw InvalidParameterError("target geometric mean must lie in (0, 1), got " +
                                    std::to_string(target_geomean));
    if (knn.distances.empty()) throw InvalidParameterError("kNN result has no edges");

    // geomean(exp(-d^2/s^2)) = exp(-mean(d^2)/s^2), so solving for the target
    // is closed-form in the mean squared edge length.
    double mean_sq = 0.0;
    for (double d : knn.distances) mean_sq += d * d;
    mean_sq /= static_cast<double>(knn.distances.size());
    if (mean_sq <= 0.0)
        throw DegenerateInputError("cannot calibrate sigma: all neighbor distances are zero");
    return std::sqrt(mean_sq / -std::log(target_geomean));
}

WeightedDigraph build_digraph(const FeatureSet &features, const KnnResult &knn, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameterError("sigma must be positive and finite, got " +
                                    std::to_string(sigma));
    const auto m = static_cast<std::size_t>(features.size());
    if (knn.neighbors.size() != m * static_cast<std::size_t>(knn.k))
        throw InvalidInputError("kNN result does not match the feature set");

    WeightedDigraph graph;
    graph.k = knn.k;
    graph.sigma = sigma;
    graph.ids = features.ids();
    graph.targets = knn.neighbors;
    graph.distances = knn.distances;
    graph.weights.resize(knn.distances.size());
    const double inv_s2 = 1.0 / (sigma * sigma);
    for (std::size_t e = 0; e < knn.distances.size(); ++e) {
        const double d = knn.distances[e];
        graph.weights[e] = std::exp(-d * d * inv_s2);
    }
    return graph;
}

} // namespace ccl
