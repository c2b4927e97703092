#ifndef CCL_SERIALIZE_HPP_
#define CCL_SERIALIZE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ccl/centrality.hpp>
#include <ccl/curriculum.hpp>
#include <ccl/geometry.hpp>
#include <ccl/simulation.hpp>

namespace ccl {

/// Centrality ranking as an array of {id, centrality, rank}, ordered by rank
/// (rank 0 = most central; ties already resolved by the ranking itself).
nlohmann::json to_json(const CentralityRanking &ranking);

/// {base_size, increment, stages: [[ids], ...]}.
nlohmann::json to_json(const CurriculumSchedule &schedule);

/// {mode, cumulative_sizes, scores, optimal_index, seed}.
nlohmann::json to_json(const ScoreCurve &curve);

/// {chi_grid, chi_alpha1, epsilon, n_annulus, log_n_packing, critical_index,
/// critical_chi}; -infinity packing entries serialize as null.
nlohmann::json to_json(const PercolationCurve &curve);

/// {seeds, fraction_v_shaped, mean_optimal_stage, optimal_stage_histogram,
/// curves}.
nlohmann::json to_json(const VshapeResult &result);

/// One row of a parsed ranking file.
struct RankingEntry {
    std::int64_t id = 0;
    double centrality = 0.0;
    std::int64_t rank = 0;
};

/// Parses and validates a centrality JSON document; entries come back sorted
/// by rank, which must be exactly 0..n-1. Unknown keys are rejected.
std::vector<RankingEntry> ranking_from_json(const nlohmann::json &doc);

/// Parses a synthetic data spec:
///   {dim, seed?, clusters: [{mean, covariance | stddev, count}, ...],
///    noise?: {count, box_min, box_max}}
/// box bounds may be scalars (broadcast to every dimension); `stddev` s means
/// covariance s^2 I. Unknown keys are rejected.
SyntheticSpec synthetic_spec_from_json(const nlohmann::json &doc);

/// Canonical dump: 2-space indent, sorted keys, trailing newline. All CLI
/// outputs go through this, which is what makes reruns byte-identical.
std::string dump_json(const nlohmann::json &doc);

} // namespace ccl

#endif // CCL_SERIALIZE_HPP_
