#include <ccl/knn.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include <ccl/errors.hpp>
#include <ccl/parallel.hpp>

namespace ccl {
namespace {

// Source rows are processed in fixed-size blocks so the arithmetic (and hence
// the result bytes) cannot depend on how many worker threads are available.
constexpr Eigen::Index kSourceBlock = 128;

struct Candidate {
    double d2;
    std::int64_t id;
    std::int32_t row;
};

// Lexicographic (distance^2, id) order; ids are unique so this is total.
bool closer(const Candidate &a, const Candidate &b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    return a.id < b.id;
}

} // namespace

int default_k(std::int64_t m) {
    if (m < 2) throw InvalidParameterError("default_k requires m >= 2");
    auto k = static_cast<std::int64_t>(std::llround(4.0 * std::log(static_cast<double>(m))));
    return static_cast<int>(std::clamp<std::int64_t>(k, 1, m - 1));
}

KnnResult pairwise_knn(const FeatureSet &features, int k) {
    const Eigen::Index m = features.size();
    if (k < 1 || k >= m)
        throw InvalidParameterError("pairwise_knn requires 1 <= k < m, got k=" +
                                    std::to_string(k) + " with m=" + std::to_string(m));

    // All distance arithmetic runs in double: squared distances come from one
    // large matrix product, which is where virtually all the time goes.
    Eigen::MatrixXd points = features.points().cast<double>().transpose(); // d x m
    Eigen::VectorXd sq_norms = points.colwise().squaredNorm();
    const std::vector<std::int64_t> &ids = features.ids();

    KnnResult result;
    result.k = k;
    result.neighbors.resize(static_cast<std::size_t>(m) * k);
    result.distances.resize(static_cast<std::size_t>(m) * k);

    const std::size_t block_count =
        static_cast<std::size_t>((m + kSourceBlock - 1) / kSourceBlock);

    parallel_for_blocks(block_count, [&](std::size_t block) {
        const Eigen::Index begin = static_cast<Eigen::Index>(block) * kSourceBlock;
        const Eigen::Index rows = std::min(kSourceBlock, m - begin);

        // Per-thread scratch, reused across blocks.
        thread_local Eigen::MatrixXd gram;
        gram.resize(rows, m);
        gram.noalias() = points.middleCols(begin, rows).transpose() * points;

        std::vector<Candidate> heap;
        heap.reserve(static_cast<std::size_t>(k));
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::Index i = begin + r;
            heap.clear();
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j == i) continue;
                const double d2 =
                    std::max(0.0, sq_norms[i] + sq_norms[j] - 2.0 * gram(r, j));
                Candidate c{d2, ids[static_cast<std::size_t>(j)],
                            static_cast<std::int32_t>(j)};
                if (heap.size() < static_cast<std::size_t>(k)) {
                    heap.push_back(c);
                    std::push_heap(heap.begin(), heap.end(), closer);
                } else if (closer(c, heap.front())) {
                    std::pop_heap(heap.begin(), heap.end(), closer);
                    heap.back() = c;
                    std::push_heap(heap.begin(), heap.end(), closer);
                }
            }
            std::sort_heap(heap.begin(), heap.end(), closer);
            const std::size_t base = static_cast<std::size_t>(i) * k;
            for (int s = 0; s < k; ++s) {
                result.neighbors[base + s] = heap[static_cast<std::size_t>(s)].row;
                result.distances[base + s] = std::sqrt(heap[static_cast<std::size_t>(s)].d2);
            }
        }
    });

    return result;
}

} // namespace ccl
