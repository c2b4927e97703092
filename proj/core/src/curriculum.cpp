#include <ccl/curriculum.hpp>

#include <algorithm>
#include <string>
#include <unordered_set>

#include <ccl/rng.hpp>

namespace ccl {
namespace {

void validate_schedule(const FeatureSet &features, const CurriculumSchedule &schedule) {
    if (schedule.stages.empty() || schedule.stages.front().empty())
        throw InvalidParameterError("schedule has no base stage");
    std::unordered_set<std::int64_t> seen;
    for (const auto &stage : schedule.stages) {
        if (stage.empty()) throw InvalidParameterError("schedule contains an empty stage");
        for (std::int64_t id : stage) {
            features.row_of(id); // throws for unknown ids
            if (!seen.insert(id).second)
                throw InvalidParameterError("schedule lists id " + std::to_string(id) +
                                            " more than once");
        }
    }
}

ScoreCurve make_curve(CurriculumMode mode, std::uint64_t seed) {
    ScoreCurve curve;
    curve.mode = mode;
    curve.seed = seed;
    return curve;
}

// Runs one stage's training + scoring, appending to the curve; wraps any
// trainer/metric exception in a TrainerError carrying the scores so far.
void score_stage(ScoreCurve &curve, std::size_t stage, const FeatureSet &features,
                 std::span<const std::int64_t> training_ids, std::int64_t seen,
                 const Trainer &trainer, const ModelState *warm_start,
                 const QualityMetric &metric, std::uint64_t stage_seed,
                 std::unique_ptr<ModelState> *state_out) {
    try {
        auto state = trainer.train(features, training_ids, warm_start, stage_seed);
        const double score = metric(*state);
        if (state_out) *state_out = std::move(state);
        curve.scores.push_back(score);
        curve.cumulative_sizes.push_back(seen);
        curve.optimal_index = select_optimal(curve.scores);
    } catch (const std::exception &e) {
        if (!curve.scores.empty()) curve.optimal_index = select_optimal(curve.scores);
        throw TrainerError("stage " + std::to_string(stage) + " failed: " + e.what(), stage,
                           curve);
    }
}

} // namespace

const char *to_string(CurriculumMode mode) {
    return mode == CurriculumMode::normal ? "normal" : "active_set";
}

CurriculumSchedule build_schedule(std::span<const std::int64_t> descending_ids,
                                  std::int64_t base_size, std::int64_t increment) {
    const auto m = static_cast<std::int64_t>(descending_ids.size());
    if (m < 2) throw InvalidParameterError("schedule needs at least 2 ids");
    if (base_size < 1 || base_size >= m)
        throw InvalidParameterError("base_size must satisfy 0 < base_size < m; got " +
                                    std::to_string(base_size) + " with m = " +
                                    std::to_string(m));
    if (increment < 1 || increment > m - base_size)
        throw InvalidParameterError("increment must satisfy 0 < increment <= m - base_size");

    CurriculumSchedule schedule;
    schedule.base_size = base_size;
    schedule.increment = increment;
    schedule.stages.emplace_back(descending_ids.begin(), descending_ids.begin() + base_size);
    for (std::int64_t begin = base_size; begin < m; begin += increment) {
        const std::int64_t end = std::min(m, begin + increment);
        schedule.stages.emplace_back(descending_ids.begin() + begin,
                                     descending_ids.begin() + end);
    }
    return schedule;
}

CurriculumSchedule build_schedule(const CentralityRanking &ranking, std::int64_t base_size,
                                  std::int64_t increment) {
    return build_schedule(ranking.order, base_size, increment);
}

std::size_t select_optimal(std::span<const double> scores) {
    if (scores.empty()) throw InvalidParameterError("select_optimal needs at least one score");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] < scores[best]) best = i;
    return best;
}

std::vector<std::int64_t> sample_history(std::span<const std::int64_t> trained_ids,
                                         std::int64_t needed, std::uint64_t seed) {
    const auto n = static_cast<std::int64_t>(trained_ids.size());
    if (needed < 0 || needed > n)
        throw InvalidParameterError("sample_history needs 0 <= needed <= history size");
    std::vector<std::int64_t> pool(trained_ids.begin(), trained_ids.end());
    Rng rng(seed);
    for (std::int64_t i = 0; i < needed; ++i) {
        const auto j = i + static_cast<std::int64_t>(
                               rng.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(needed));
    return pool;
}

ScoreCurve run_normal(const FeatureSet &features, const CurriculumSchedule &schedule,
                      const Trainer &trainer, const QualityMetric &metric,
                      std::uint64_t seed) {
    validate_schedule(features, schedule);
    ScoreCurve curve = make_curve(CurriculumMode::normal, seed);
    std::vector<std::int64_t> prefix;
    prefix.reserve(static_cast<std::size_t>(schedule.total_size()));
    for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
        const auto &stage = schedule.stages[i];
        prefix.insert(prefix.end(), stage.begin(), stage.end());
        score_stage(curve, i, features, prefix, static_cast<std::int64_t>(prefix.size()),
                    trainer, nullptr, metric, derive_seed(seed, i), nullptr);
    }
    return curve;
}

ScoreCurve run_active_set(const FeatureSet &features, const CurriculumSchedule &schedule,
                          const ActiveSetConfig &config, const Trainer &trainer,
                          const QualityMetric &metric, std::uint64_t seed) {
    validate_schedule(features, schedule);
    if (!trainer.supports_warm_start())
        throw InvalidParameterError(
            "run_active_set requires a trainer that supports warm starts");
    if (config.active_size < schedule.increment)
        throw InvalidParameterError("active_size must be at least the schedule increment");
    if (config.active_size > features.size())
        throw InvalidParameterError("active_size cannot exceed the number of points");

    ScoreCurve curve = make_curve(CurriculumMode::active_set, seed);
    std::unique_ptr<ModelState> state;
    std::vector<std::int64_t> history;
    history.reserve(static_cast<std::size_t>(schedule.total_size()));

    const auto &base = schedule.stages.front();
    score_stage(curve, 0, features, base, static_cast<std::int64_t>(base.size()), trainer,
                nullptr, metric, derive_seed(seed, 0), &state);
    history.insert(history.end(), base.begin(), base.end());

    for (std::size_t i = 1; i < schedule.stages.size(); ++i) {
        const auto &fresh = schedule.stages[i];
        const std::int64_t wanted = config.active_size - static_cast<std::int64_t>(fresh.size());
        const std::int64_t needed =
            std::min(wanted, static_cast<std::int64_t>(history.size()));
        std::vector<std::int64_t> active(fresh.begin(), fresh.end());
        if (needed > 0) {
            const auto sampled = sample_history(history, needed, derive_seed(config.seed, i));
            active.insert(active.end(), sampled.begin(), sampled.end());
        }
        std::unique_ptr<ModelState> next;
        score_stage(curve, i, features, active,
                    static_cast<std::int64_t>(history.size() + fresh.size()), trainer,
                    state.get(), metric, derive_seed(seed, i), &next);
        state = std::move(next);
        history.insert(history.end(), fresh.begin(), fresh.end());
    }
    return curve;
}

} // namespace ccl
