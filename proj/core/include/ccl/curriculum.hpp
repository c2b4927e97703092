#ifndef CCL_CURRICULUM_HPP_
#define CCL_CURRICULUM_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <ccl/centrality.hpp>
#include <ccl/errors.hpp>
#include <ccl/feature_set.hpp>

namespace ccl {

/// Ids partitioned into a base stage X0 plus l increment stages, all in
/// descending-centrality order; concatenating the stages reproduces that
/// order. Every increment stage has exactly `increment` ids except possibly
/// the last, which holds the remainder.
struct CurriculumSchedule {
    std::int64_t base_size = 0;
    std::int64_t increment = 0;
    std::vector<std::vector<std::int64_t>> stages;

    std::size_t increments() const { return stages.empty() ? 0 : stages.size() - 1; }
    std::int64_t total_size() const {
        std::int64_t n = 0;
        for (const auto &stage : stages) n += static_cast<std::int64_t>(stage.size());
        return n;
    }
};

/// Opaque trained-model state. Concrete trainers downcast; the curriculum
/// runners only thread it through as a warm-start handle.
class ModelState {
public:
    virtual ~ModelState() = default;
};

/// A deterministic training procedure: identical (data, warm_start, seed)
/// must produce an identical model. Implementations that cannot resume from
/// a previous state return false from supports_warm_start() and are rejected
/// by run_active_set.
class Trainer {
public:
    virtual ~Trainer() = default;
    virtual bool supports_warm_start() const = 0;
    virtual std::unique_ptr<ModelState> train(const FeatureSet &features,
                                              std::span<const std::int64_t> ids,
                                              const ModelState *warm_start,
                                              std::uint64_t seed) const = 0;
};

/// Score of a trained model; lower is better.
using QualityMetric = std::function<double(const ModelState &)>;

enum class CurriculumMode { normal, active_set };

const char *to_string(CurriculumMode mode);

struct ScoreCurve {
    CurriculumMode mode = CurriculumMode::normal;
    std::vector<std::int64_t> cumulative_sizes; // data seen through each stage
    std::vector<double> scores;                 // one per stage, lower is better
    std::size_t optimal_index = 0;              // argmin, ties to the smallest
    std::uint64_t seed = 0;
};

struct ActiveSetConfig {
    std::int64_t active_size = 0; // fixed training-set size after the base stage
    std::uint64_t seed = 0;       // stream for history sampling
};

/// A stage's training run threw; carries the stage index and the scores
/// gathered before the failure.
class TrainerError : public Error {
public:
    TrainerError(const std::string &what, std::size_t stage, ScoreCurve partial)
        : Error(what), stage_(stage), partial_(std::move(partial)) {}
    std::size_t stage() const { return stage_; }
    const ScoreCurve &partial_curve() const { return partial_; }

private:
    std::size_t stage_;
    ScoreCurve partial_;
};

/// Splits `descending_ids` into [base_size, increment, increment, ...] stages.
/// Requires 0 < base_size < m and 0 < increment.
CurriculumSchedule build_schedule(std::span<const std::int64_t> descending_ids,
                                  std::int64_t base_size, std::int64_t increment);

/// Convenience overload over a centrality ranking's descending order.
CurriculumSchedule build_schedule(const CentralityRanking &ranking, std::int64_t base_size,
                                  std::int64_t increment);

/// Index of the smallest score; ties go to the smallest index.
std::size_t select_optimal(std::span<const double> scores);

/// Uniform sample of `needed` distinct ids from `trained_ids`, reproducible
/// under `seed`; result order is the shuffle order.
std::vector<std::int64_t> sample_history(std::span<const std::int64_t> trained_ids,
                                         std::int64_t needed, std::uint64_t seed);

/// Trains one model per cumulative prefix X0 u ... u Xi, each from a fresh
/// random initialization (stage i uses sub-seed derive_seed(seed, i)), and
/// scores it. Stage failures raise TrainerError with the partial curve.
ScoreCurve run_normal(const FeatureSet &features, const CurriculumSchedule &schedule,
                      const Trainer &trainer, const QualityMetric &metric,
                      std::uint64_t seed);

/// Trains stage 0 on the full base set, then each later stage on an active
/// set of min(active_size, data seen) points — the stage's new ids plus a
/// fresh uniform sample of history — warm-starting from the previous stage's
/// model.
ScoreCurve run_active_set(const FeatureSet &features, const CurriculumSchedule &schedule,
                          const ActiveSetConfig &config, const Trainer &trainer,
                          const QualityMetric &metric, std::uint64_t seed);

} // namespace ccl

#endif // CCL_CURRICULUM_HPP_
