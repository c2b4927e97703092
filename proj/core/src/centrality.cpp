#include <ccl/centrality.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <ccl/errors.hpp>
#include <ccl/parallel.hpp>

namespace ccl {
namespace {

constexpr double kTeleportDamping = 0.999;
constexpr int kPlateauWindow = 200;     // iterations between stall checks
constexpr double kPlateauRatio = 0.995; // residual shrink demanded per window
constexpr std::size_t kTargetBlock = 8192;

// Incoming edges of the row-normalized walk, in CSR form keyed by target.
// Power iteration multiplies by P^T, so gathering over in-edges lets each
// output slot be owned by exactly one block (deterministic under threading).
struct TransposeCsr {
    std::vector<std::int64_t> offsets; // m+1
    std::vector<std::int32_t> sources; // m*k
    std::vector<double> probs;         // m*k, rows of P

    static TransposeCsr build(const WeightedDigraph &graph) {
        const Eigen::Index m = graph.size();
        const int k = graph.k;
        std::vector<double> row_sum(static_cast<std::size_t>(m), 0.0);
        for (Eigen::Index i = 0; i < m; ++i) {
            double sum = 0.0;
            for (double w : graph.weight_row(i)) sum += w;
            if (!(sum > 0.0))
                throw DegenerateInputError("node id " + std::to_string(graph.ids[i]) +
                                           " has zero total edge weight");
            row_sum[static_cast<std::size_t>(i)] = sum;
        }

        TransposeCsr csr;
        csr.offsets.assign(static_cast<std::size_t>(m) + 1, 0);
        for (std::int32_t t : graph.targets) {
            if (t < 0 || t >= m)
                throw InvalidInputError("edge target " + std::to_string(t) + " out of range");
            ++csr.offsets[static_cast<std::size_t>(t) + 1];
        }
        std::partial_sum(csr.offsets.begin(), csr.offsets.end(), csr.offsets.begin());

        const std::size_t edges = graph.targets.size();
        csr.sources.resize(edges);
        csr.probs.resize(edges);
        std::vector<std::int64_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double inv = 1.0 / row_sum[static_cast<std::size_t>(i)];
            const std::size_t base = static_cast<std::size_t>(i) * k;
            for (int s = 0; s < k; ++s) {
                const auto t = static_cast<std::size_t>(graph.targets[base + s]);
                const auto pos = static_cast<std::size_t>(cursor[t]++);
                csr.sources[pos] = static_cast<std::int32_t>(i);
                csr.probs[pos] = graph.weights[base + s] * inv;
            }
        }
        return csr;
    }
};

class PowerIteration {
  public:
    PowerIteration(const TransposeCsr &csr, Eigen::Index m, double damping)
        : csr_(csr), m_(m), damping_(damping),
          shift_(damping < 1.0 ? (1.0 - damping) / static_cast<double>(m) : 0.0),
          block_count_((static_cast<std::size_t>(m) + kTargetBlock - 1) / kTargetBlock) {}

    // out = damping * P^T in + (1 - damping)/m. Both vectors sum to ~1.
    void multiply(const std::vector<double> &in, std::vector<double> &out) const {
        parallel_for_blocks(block_count_, [&](std::size_t block) {
            const std::size_t begin = block * kTargetBlock;
            const std::size_t end =
                std::min(begin + kTargetBlock, static_cast<std::size_t>(m_));
            for (std::size_t t = begin; t < end; ++t) {
                double acc = 0.0;
                const auto lo = static_cast<std::size_t>(csr_.offsets[t]);
                const auto hi = static_cast<std::size_t>(csr_.offsets[t + 1]);
                for (std::size_t e = lo; e < hi; ++e)
                    acc += csr_.probs[e] * in[static_cast<std::size_t>(csr_.sources[e])];
                out[t] = damping_ * acc + shift_;
            }
        });
    }

    double exact_residual(const std::vector<double> &u, std::vector<double> &scratch) const {
        multiply(u, scratch);
        double res = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) res += std::abs(scratch[j] - u[j]);
        return res;
    }

    struct Outcome {
        bool converged = false;
        double residual = 0.0;
        int iterations = 0;
    };

    Outcome run(const PowerIterationOptions &options, std::vector<double> &u) const {
        std::fill(u.begin(), u.end(), 1.0 / static_cast<double>(m_));
        std::vector<double> v(u.size());
        std::vector<double> scratch(u.size());
        double window_residual = std::numeric_limits<double>::infinity();
        double delta = std::numeric_limits<double>::infinity();
        int it = 0;
        for (it = 1; it <= options.max_iters; ++it) {
            multiply(u, v);
            double sum = 0.0;
            for (double x : v) sum += x;
            const double inv = 1.0 / sum;
            delta = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                v[j] *= inv;
                delta += std::abs(v[j] - u[j]);
            }
            u.swap(v);
            if (delta < options.tol) {
                // Confirm on the returned vector itself so the reported
                // residual is the true stationarity defect, not the step size.
                const double exact = exact_residual(u, scratch);
                if (exact < options.tol) return {true, exact, it};
            }
            if (it % kPlateauWindow == 0) {
                if (delta >= kPlateauRatio * window_residual) break; // stalled
                window_residual = delta;
            }
        }
        return {false, exact_residual(u, scratch), std::min(it, options.max_iters)};
    }

  private:
    const TransposeCsr &csr_;
    Eigen::Index m_;
    double damping_;
    double shift_;
    std::size_t block_count_;
};

} // namespace

const char *to_string(CentralityVariant variant) {
    return variant == CentralityVariant::plain ? "plain" : "teleport";
}

CentralityRanking stationary_centrality(const WeightedDigraph &graph,
                                        const PowerIterationOptions &options) {
    if (options.max_iters < 1) throw InvalidParameterError("max_iters must be at least 1");
    if (!(options.tol > 0.0)) throw InvalidParameterError("tol must be positive");
    const Eigen::Index m = graph.size();
    if (m < 2) throw InvalidInputError("graph needs at least 2 nodes");

    const TransposeCsr csr = TransposeCsr::build(graph);
    std::vector<double> u(static_cast<std::size_t>(m));

    CentralityRanking ranking;
    ranking.variant = CentralityVariant::plain;
    PowerIteration plain(csr, m, 1.0);
    PowerIteration::Outcome outcome = plain.run(options, u);
    if (!outcome.converged) {
        ranking.variant = CentralityVariant::teleport;
        PowerIteration teleport(csr, m, kTeleportDamping);
        outcome = teleport.run(options, u);
    }
    if (!outcome.converged)
        throw ConvergenceError("power iteration did not reach tol " +
                                   std::to_string(options.tol) + " within " +
                                   std::to_string(options.max_iters) +
                                   " iterations (plain and teleport variants)",
                               outcome.residual);

    ranking.centrality = std::move(u);
    ranking.ids = graph.ids;
    ranking.residual = outcome.residual;
    ranking.iterations = outcome.iterations;

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ca = ranking.centrality[static_cast<std::size_t>(a)];
        const double cb = ranking.centrality[static_cast<std::size_t>(b)];
        if (ca != cb) return ca > cb;
        return ranking.ids[static_cast<std::size_t>(a)] < ranking.ids[static_cast<std::size_t>(b)];
    });
    ranking.order.resize(static_cast<std::size_t>(m));
    for (std::size_t r = 0; r < idx.size(); ++r)
        ranking.order[r] = ranking.ids[static_cast<std::size_t>(idx[r])];
    return ranking;
}

} // namespace ccl
