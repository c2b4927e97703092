#include <ccl/serialize.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <ccl/errors.hpp>

namespace ccl {
namespace {

using nlohmann::json;

void require_keys(const json &obj, std::initializer_list<const char *> allowed,
                  const std::string &where) {
    for (const auto &item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char *key) {
                return item.key() == key;
            }) == allowed.end())
            throw InvalidInputError(where + ": unknown key '" + item.key() + "'");
    }
}

const json &require(const json &obj, const char *key, const std::string &where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw InvalidInputError(where + ": missing key '" + key + "'");
    return *it;
}

std::int64_t as_int(const json &value, const std::string &where) {
    if (!value.is_number_integer() && !value.is_number_unsigned())
        throw InvalidInputError(where + ": expected an integer");
    return value.get<std::int64_t>();
}

double as_number(const json &value, const std::string &where) {
    if (!value.is_number()) throw InvalidInputError(where + ": expected a number");
    return value.get<double>();
}

Eigen::VectorXd as_vector(const json &value, int dim, bool allow_scalar,
                          const std::string &where) {
    if (allow_scalar && value.is_number())
        return Eigen::VectorXd::Constant(dim, value.get<double>());
    if (!value.is_array() || static_cast<int>(value.size()) != dim)
        throw InvalidInputError(where + ": expected an array of " + std::to_string(dim) +
                                " numbers");
    Eigen::VectorXd result(dim);
    for (int j = 0; j < dim; ++j)
        result[j] = as_number(value[static_cast<std::size_t>(j)],
                              where + "[" + std::to_string(j) + "]");
    return result;
}

Eigen::MatrixXd as_matrix(const json &value, int dim, const std::string &where) {
    if (!value.is_array() || static_cast<int>(value.size()) != dim)
        throw InvalidInputError(where + ": expected a " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix");
    Eigen::MatrixXd result(dim, dim);
    for (int i = 0; i < dim; ++i)
        result.row(i) = as_vector(value[static_cast<std::size_t>(i)], dim, false,
                                  where + "[" + std::to_string(i) + "]")
                            .transpose();
    return result;
}

} // namespace

json to_json(const CentralityRanking &ranking) {
    std::unordered_map<std::int64_t, double> by_id;
    by_id.reserve(ranking.ids.size());
    for (std::size_t i = 0; i < ranking.ids.size(); ++i)
        by_id.emplace(ranking.ids[i], ranking.centrality[i]);

    json doc = json::array();
    for (std::size_t rank = 0; rank < ranking.order.size(); ++rank) {
        const std::int64_t id = ranking.order[rank];
        doc.push_back({{"id", id}, {"centrality", by_id.at(id)}, {"rank", rank}});
    }
    return doc;
}

json to_json(const CurriculumSchedule &schedule) {
    json stages = json::array();
    for (const auto &stage : schedule.stages) stages.push_back(stage);
    return {{"base_size", schedule.base_size},
            {"increment", schedule.increment},
            {"stages", std::move(stages)}};
}

json to_json(const ScoreCurve &curve) {
    return {{"mode", to_string(curve.mode)},
            {"cumulative_sizes", curve.cumulative_sizes},
            {"scores", curve.scores},
            {"optimal_index", curve.optimal_index},
            {"seed", curve.seed}};
}

json to_json(const PercolationCurve &curve) {
    json packing = json::array();
    for (double v : curve.log_n_packing) {
        if (std::isfinite(v))
            packing.push_back(v);
        else
            packing.push_back(nullptr);
    }
    return {{"chi_grid", curve.chi_grid},
            {"chi_alpha1", curve.chi_alpha1},
            {"epsilon", curve.epsilon},
            {"n_annulus", curve.n_annulus},
            {"log_n_packing", std::move(packing)},
            {"critical_index", curve.critical_index},
            {"critical_chi", curve.chi_grid[curve.critical_index]}};
}

json to_json(const VshapeResult &result) {
    json curves = json::array();
    for (const auto &curve : result.curves) curves.push_back(to_json(curve));
    return {{"seeds", result.seeds},
            {"fraction_v_shaped", result.fraction_v_shaped},
            {"mean_optimal_stage", result.mean_optimal_stage},
            {"optimal_stage_histogram", result.optimal_stage_histogram},
            {"curves", std::move(curves)}};
}

std::vector<RankingEntry> ranking_from_json(const json &doc) {
    if (!doc.is_array() || doc.empty())
        throw InvalidInputError("ranking: expected a non-empty array");
    std::vector<RankingEntry> entries;
    entries.reserve(doc.size());
    std::unordered_set<std::int64_t> seen_ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string where = "ranking[" + std::to_string(i) + "]";
        const json &item = doc[i];
        if (!item.is_object()) throw InvalidInputError(where + ": expected an object");
        require_keys(item, {"id", "centrality", "rank"}, where);
        RankingEntry entry;
        entry.id = as_int(require(item, "id", where), where + ".id");
        entry.centrality = as_number(require(item, "centrality", where), where + ".centrality");
        entry.rank = as_int(require(item, "rank", where), where + ".rank");
        if (!seen_ids.insert(entry.id).second)
            throw InvalidInputError(where + ": duplicate id " + std::to_string(entry.id));
        entries.push_back(entry);
    }
    std::sort(entries.begin(), entries.end(),
              [](const RankingEntry &a, const RankingEntry &b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].rank != static_cast<std::int64_t>(i))
            throw InvalidInputError("ranking: ranks must be exactly 0.." +
                                    std::to_string(entries.size() - 1));
    return entries;
}

SyntheticSpec synthetic_spec_from_json(const json &doc) {
    if (!doc.is_object()) throw InvalidInputError("spec: expected an object");
    require_keys(doc, {"dim", "seed", "clusters", "noise"}, "spec");

    SyntheticSpec spec;
    const std::int64_t dim = as_int(require(doc, "dim", "spec"), "spec.dim");
    if (dim < 1) throw InvalidInputError("spec.dim: must be at least 1");
    spec.dim = static_cast<int>(dim);
    if (doc.contains("seed")) {
        const json &seed = doc["seed"];
        if (!seed.is_number_unsigned() && !seed.is_number_integer())
            throw InvalidInputError("spec.seed: expected an integer");
        spec.seed = seed.get<std::uint64_t>();
    }

    const json &clusters = require(doc, "clusters", "spec");
    if (!clusters.is_array() || clusters.empty())
        throw InvalidInputError("spec.clusters: expected a non-empty array");
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const std::string where = "spec.clusters[" + std::to_string(c) + "]";
        const json &item = clusters[c];
        if (!item.is_object()) throw InvalidInputError(where + ": expected an object");
        require_keys(item, {"mean", "covariance", "stddev", "count"}, where);
        ClusterSpec cluster;
        cluster.mean = as_vector(require(item, "mean", where), spec.dim, false, where + ".mean");
        cluster.count = as_int(require(item, "count", where), where + ".count");
        const bool has_cov = item.contains("covariance");
        const bool has_stddev = item.contains("stddev");
        if (has_cov == has_stddev)
            throw InvalidInputError(where + ": provide exactly one of 'covariance' and 'stddev'");
        if (has_cov) {
            cluster.covariance = as_matrix(item["covariance"], spec.dim, where + ".covariance");
        } else {
            const double stddev = as_number(item["stddev"], where + ".stddev");
            if (!(stddev > 0.0)) throw InvalidInputError(where + ".stddev: must be positive");
            cluster.covariance =
                Eigen::MatrixXd::Identity(spec.dim, spec.dim) * (stddev * stddev);
        }
        spec.clusters.push_back(std::move(cluster));
    }

    if (doc.contains("noise")) {
        const json &noise = doc["noise"];
        if (!noise.is_object()) throw InvalidInputError("spec.noise: expected an object");
        require_keys(noise, {"count", "box_min", "box_max"}, "spec.noise");
        NoiseSpec parsed;
        parsed.count = as_int(require(noise, "count", "spec.noise"), "spec.noise.count");
        parsed.box_min =
            as_vector(require(noise, "box_min", "spec.noise"), spec.dim, true, "spec.noise.box_min");
        parsed.box_max =
            as_vector(require(noise, "box_max", "spec.noise"), spec.dim, true, "spec.noise.box_max");
        spec.noise = std::move(parsed);
    }
    return spec;
}

std::string dump_json(const json &doc) { return doc.dump(2) + "\n"; }

} // namespace ccl
