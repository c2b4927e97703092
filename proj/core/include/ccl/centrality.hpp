#ifndef CCL_CENTRALITY_HPP_
#define CCL_CENTRALITY_HPP_

#include <cstdint>
#include <vector>

#include <ccl/graph.hpp>

namespace ccl {

struct PowerIterationOptions {
    double tol = 1e-10; // L1 residual below which iteration stops
    int max_iters = 10000;
};

/// Which transition matrix the reported distribution is stationary for:
/// the plain row-normalized kNN walk, or the damped walk
/// 0.999 P + 0.001 (1/m) 11^T used as a fallback when the plain walk
/// fails to mix (reducible or periodic graphs).
enum class CentralityVariant { plain, teleport };

struct CentralityRanking {
    std::vector<double> centrality;    // stationary mass per node, row order
    std::vector<std::int64_t> ids;     // point ids, row order
    std::vector<std::int64_t> order;   // ids sorted by descending centrality,
                                       // ties by ascending id
    double residual = 0.0;             // final L1 residual
    int iterations = 0;                // iterations of the converged attempt
    CentralityVariant variant = CentralityVariant::plain;
};

const char *to_string(CentralityVariant variant);

/// Stationary distribution of the row-normalized random walk on the graph,
/// found by power iteration on P^T from the uniform vector. A residual
/// plateau (or exhausted iteration budget) on the plain walk triggers one
/// retry with the teleport-damped walk; if that also fails to reach tol,
/// throws ConvergenceError carrying the final residual.
CentralityRanking stationary_centrality(const WeightedDigraph &graph,
                                        const PowerIterationOptions &options = {});

} // namespace ccl

#endif // CCL_CENTRALITY_HPP_
