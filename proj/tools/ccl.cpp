// Command-line front end: centrality ranking, curriculum sweeps, percolation
// curves and the synthetic V-shape experiment, all as pure functions of
// (input files, flags) with atomically-written JSON outputs.
//
// Exit codes: 0 success, 2 input/usage error, 3 numerical/degeneracy error.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <ccl/centrality.hpp>
#include <ccl/curriculum.hpp>
#include <ccl/errors.hpp>
#include <ccl/geometry.hpp>
#include <ccl/graph.hpp>
#include <ccl/io.hpp>
#include <ccl/knn.hpp>
#include <ccl/rng.hpp>
#include <ccl/serialize.hpp>
#include <ccl/simulation.hpp>

namespace {

using nlohmann::json;

ccl::FeatureFormat parse_format(const std::string &name) {
    if (name == "auto") return ccl::FeatureFormat::auto_detect;
    if (name == "csv") return ccl::FeatureFormat::csv;
    if (name == "bin") return ccl::FeatureFormat::binary;
    throw ccl::InvalidParameterError("unknown format '" + name + "'");
}

json load_json(const std::filesystem::path &path) {
    const std::string text = ccl::read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ccl::IoError(path.string() + ": " + e.what());
    }
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    (void)ec;
    return std::string(buffer, ptr);
}

struct CentralityArgs {
    std::string input;
    std::string format = "auto";
    std::string output = "centrality.json";
    std::string dump_graph;
    int k = 0; // 0 = derive from m
    double target_geomean = 0.8;
    double tol = 1e-10;
    int max_iters = 10000;
};

int cmd_centrality(const CentralityArgs &args) {
    const ccl::FeatureSet features = ccl::load_features(args.input, parse_format(args.format));
    const int k = args.k > 0 ? args.k : ccl::default_k(features.size());
    const ccl::KnnResult knn = ccl::pairwise_knn(features, k);
    const double sigma = ccl::calibrate_sigma(knn, args.target_geomean);
    const ccl::WeightedDigraph graph = ccl::build_digraph(features, knn, sigma);

    if (!args.dump_graph.empty()) {
        std::string csv = "source_id,target_id,distance,weight\n";
        for (Eigen::Index i = 0; i < graph.size(); ++i) {
            const std::size_t base = static_cast<std::size_t>(i) * graph.k;
            for (int s = 0; s < graph.k; ++s) {
                csv += std::to_string(graph.ids[static_cast<std::size_t>(i)]);
                csv += ',';
                csv += std::to_string(
                    graph.ids[static_cast<std::size_t>(graph.targets[base + s])]);
                csv += ',';
                csv += format_double(graph.distances[base + s]);
                csv += ',';
                csv += format_double(graph.weights[base + s]);
                csv += '\n';
            }
        }
        ccl::write_file_atomic(args.dump_graph, csv);
    }

    ccl::PowerIterationOptions options;
    options.tol = args.tol;
    options.max_iters = args.max_iters;
    const ccl::CentralityRanking ranking = ccl::stationary_centrality(graph, options);

    ccl::write_file_atomic(args.output, ccl::dump_json(ccl::to_json(ranking)));
    std::printf("centrality: m=%lld k=%d sigma=%s variant=%s iterations=%d residual=%s -> %s\n",
                static_cast<long long>(features.size()), k, format_double(sigma).c_str(),
                ccl::to_string(ranking.variant), ranking.iterations,
                format_double(ranking.residual).c_str(), args.output.c_str());
    return 0;
}

struct CurriculumArgs {
    std::string features;
    std::string format = "auto";
    std::string ranking;
    std::string reference;
    std::string config;
    std::string output = "curve.json";
    std::string schedule_output = "schedule.json";
    std::string mode = "normal";
    std::string trainer = "gaussian";
    std::string metric = "frechet";
    std::int64_t base_size = 0;
    std::int64_t increment = 0;
    std::int64_t active_size = 0;
    int gmm_components = 2;
    std::uint64_t seed = 0;
};

// --config supplies defaults for any parameter not given as a flag.
void merge_config(CurriculumArgs &args, const CLI::App &cmd) {
    const json config = load_json(args.config);
    if (!config.is_object()) throw ccl::InvalidInputError("config: expected an object");
    static const std::unordered_set<std::string> known = {
        "base_size", "increment", "active_size", "seed", "trainer", "metric"};
    for (const auto &item : config.items())
        if (known.find(item.key()) == known.end())
            throw ccl::InvalidInputError("config: unknown key '" + item.key() + "'");

    const auto int_key = [&](const char *key, auto &target) {
        if (!config.contains(key)) return;
        if (!config[key].is_number_integer() && !config[key].is_number_unsigned())
            throw ccl::InvalidInputError(std::string("config: '") + key +
                                         "' must be an integer");
        target = config[key].get<std::decay_t<decltype(target)>>();
    };
    if (cmd.count("--base") == 0) int_key("base_size", args.base_size);
    if (cmd.count("--increment") == 0) int_key("increment", args.increment);
    if (cmd.count("--active-size") == 0) int_key("active_size", args.active_size);
    if (cmd.count("--seed") == 0) int_key("seed", args.seed);
    if (cmd.count("--trainer") == 0 && config.contains("trainer")) {
        if (!config["trainer"].is_string())
            throw ccl::InvalidInputError("config: 'trainer' must be a string");
        args.trainer = config["trainer"].get<std::string>();
    }
    if (cmd.count("--metric") == 0 && config.contains("metric")) {
        if (!config["metric"].is_string())
            throw ccl::InvalidInputError("config: 'metric' must be a string");
        args.metric = config["metric"].get<std::string>();
    }
}

int cmd_curriculum(CurriculumArgs &args, const CLI::App &cmd) {
    if (!args.config.empty()) merge_config(args, cmd);
    if (args.mode != "normal" && args.mode != "active")
        throw ccl::InvalidParameterError("mode must be 'normal' or 'active'");
    if (args.mode == "active" && args.active_size <= 0)
        throw ccl::InvalidParameterError("--active-size is required for active mode");
    if (args.metric != "frechet")
        throw ccl::InvalidParameterError("unknown metric '" + args.metric + "'");

    const ccl::FeatureSet features =
        ccl::load_features(args.features, parse_format(args.format));

    const auto entries = ccl::ranking_from_json(load_json(args.ranking));
    if (static_cast<Eigen::Index>(entries.size()) != features.size())
        throw ccl::InvalidInputError(
            "ranking lists " + std::to_string(entries.size()) + " ids but features have " +
            std::to_string(features.size()));
    std::vector<std::int64_t> order;
    order.reserve(entries.size());
    for (const auto &entry : entries) {
        if (!features.has_id(entry.id))
            throw ccl::InvalidInputError("ranking id " + std::to_string(entry.id) +
                                         " is not in the feature set");
        order.push_back(entry.id);
    }

    const ccl::CurriculumSchedule schedule =
        ccl::build_schedule(order, args.base_size, args.increment);

    std::unique_ptr<ccl::Trainer> trainer;
    if (args.trainer == "gaussian") {
        trainer = std::make_unique<ccl::GaussianTrainer>();
    } else if (args.trainer == "gmm") {
        trainer = std::make_unique<ccl::GmmTrainer>(args.gmm_components);
    } else {
        throw ccl::InvalidParameterError("unknown trainer '" + args.trainer + "'");
    }

    std::optional<ccl::FeatureSet> reference;
    if (!args.reference.empty())
        reference.emplace(ccl::load_features(args.reference, ccl::FeatureFormat::auto_detect));
    const ccl::QualityMetric metric =
        ccl::make_reference_metric(reference ? *reference : features);

    ccl::ScoreCurve curve;
    if (args.mode == "normal") {
        curve = ccl::run_normal(features, schedule, *trainer, metric, args.seed);
    } else {
        ccl::ActiveSetConfig config;
        config.active_size = args.active_size;
        config.seed = ccl::derive_seed(args.seed, 1);
        curve = ccl::run_active_set(features, schedule, config, *trainer, metric, args.seed);
    }

    ccl::write_file_atomic(args.schedule_output, ccl::dump_json(ccl::to_json(schedule)));
    ccl::write_file_atomic(args.output, ccl::dump_json(ccl::to_json(curve)));
    std::printf("optimal stage %zu of %zu: cumulative size %lld, score %s -> %s\n",
                curve.optimal_index, curve.scores.size() - 1,
                static_cast<long long>(curve.cumulative_sizes[curve.optimal_index]),
                format_double(curve.scores[curve.optimal_index]).c_str(),
                args.output.c_str());
    return 0;
}

struct PercolationArgs {
    std::string input;
    std::string format = "auto";
    std::string output = "percolation.json";
    int grid_size = 200;
    double ridge = 0.0;
};

int cmd_percolation(const PercolationArgs &args) {
    const ccl::FeatureSet features = ccl::load_features(args.input, parse_format(args.format));
    ccl::EllipsoidOptions options;
    options.ridge = args.ridge;
    const ccl::PercolationCurve curve =
        ccl::percolation_curve(features, args.grid_size, options);
    ccl::write_file_atomic(args.output, ccl::dump_json(ccl::to_json(curve)));
    std::printf("critical chi=%s (index %zu of %zu), chi_alpha1=%s, epsilon=%s -> %s\n",
                format_double(curve.chi_grid[curve.critical_index]).c_str(),
                curve.critical_index, curve.chi_grid.size() - 1,
                format_double(curve.chi_alpha1).c_str(),
                format_double(curve.epsilon).c_str(), args.output.c_str());
    return 0;
}

struct SimulateArgs {
    std::string spec;
    std::string output = "summary.json";
    std::int64_t base_size = 0;
    std::int64_t increment = 0;
    std::vector<std::uint64_t> seeds;
};

int cmd_simulate(const SimulateArgs &args) {
    const ccl::SyntheticSpec spec = ccl::synthetic_spec_from_json(load_json(args.spec));
    const ccl::VshapeResult result =
        ccl::vshape_experiment(spec, args.base_size, args.increment, args.seeds);
    ccl::write_file_atomic(args.output, ccl::dump_json(ccl::to_json(result)));
    std::printf("seeds=%zu fraction_v_shaped=%s mean_optimal_stage=%s -> %s\n",
                result.seeds.size(), format_double(result.fraction_v_shaped).c_str(),
                format_double(result.mean_optimal_stage).c_str(), args.output.c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"cluster-curriculum learning toolkit"};
    app.require_subcommand(1);

    CentralityArgs centrality;
    CLI::App *centrality_cmd =
        app.add_subcommand("centrality", "rank points by kNN-walk stationary centrality");
    centrality_cmd->add_option("--input,-i", centrality.input, "feature file (CSV or CCFS)")
        ->required();
    centrality_cmd->add_option("--format", centrality.format, "input format")
        ->check(CLI::IsMember({"auto", "csv", "bin"}));
    centrality_cmd->add_option("--k", centrality.k, "neighbors per point (default: round(4 ln m))")
        ->check(CLI::PositiveNumber);
    centrality_cmd->add_option("--target-geomean", centrality.target_geomean,
                               "geometric mean the edge weights are calibrated to");
    centrality_cmd->add_option("--tol", centrality.tol, "power-iteration L1 tolerance");
    centrality_cmd->add_option("--max-iters", centrality.max_iters,
                               "power-iteration budget per variant");
    centrality_cmd->add_option("--output,-o", centrality.output, "ranking JSON path");
    centrality_cmd->add_option("--dump-graph", centrality.dump_graph,
                               "also write the weighted edge list as CSV");

    CurriculumArgs curriculum;
    CLI::App *curriculum_cmd =
        app.add_subcommand("curriculum", "run a curriculum training sweep");
    curriculum_cmd->add_option("--features", curriculum.features, "feature file")->required();
    curriculum_cmd->add_option("--format", curriculum.format, "input format")
        ->check(CLI::IsMember({"auto", "csv", "bin"}));
    curriculum_cmd->add_option("--ranking", curriculum.ranking, "centrality JSON")->required();
    curriculum_cmd->add_option("--base", curriculum.base_size, "base stage size");
    curriculum_cmd->add_option("--increment", curriculum.increment, "increment stage size");
    curriculum_cmd->add_option("--mode", curriculum.mode, "normal or active");
    curriculum_cmd->add_option("--active-size", curriculum.active_size,
                               "active-set size (active mode)");
    curriculum_cmd->add_option("--seed", curriculum.seed, "run seed");
    curriculum_cmd->add_option("--trainer", curriculum.trainer, "gaussian or gmm");
    curriculum_cmd->add_option("--gmm-components", curriculum.gmm_components,
                               "mixture components for the gmm trainer");
    curriculum_cmd->add_option("--metric", curriculum.metric, "quality metric");
    curriculum_cmd->add_option("--reference", curriculum.reference,
                               "reference features to score against (default: the input)");
    curriculum_cmd->add_option("--config", curriculum.config,
                               "JSON config supplying defaults for the flags above");
    curriculum_cmd->add_option("--output,-o", curriculum.output, "score-curve JSON path");
    curriculum_cmd->add_option("--schedule-output", curriculum.schedule_output,
                               "schedule JSON path");

    PercolationArgs percolation;
    CLI::App *percolation_cmd =
        app.add_subcommand("percolation", "sweep annulus counts over a chi grid");
    percolation_cmd->add_option("--input,-i", percolation.input, "feature file")->required();
    percolation_cmd->add_option("--format", percolation.format, "input format")
        ->check(CLI::IsMember({"auto", "csv", "bin"}));
    percolation_cmd->add_option("--grid-size", percolation.grid_size, "chi grid resolution");
    percolation_cmd->add_option("--ridge", percolation.ridge,
                                "diagonal ridge added to the covariance");
    percolation_cmd->add_option("--output,-o", percolation.output, "curve JSON path");

    SimulateArgs simulate;
    CLI::App *simulate_cmd =
        app.add_subcommand("simulate", "V-shape experiment on a synthetic spec");
    simulate_cmd->add_option("--spec", simulate.spec, "synthetic spec JSON")->required();
    simulate_cmd->add_option("--base", simulate.base_size, "base stage size")->required();
    simulate_cmd->add_option("--increment", simulate.increment, "increment stage size")
        ->required();
    simulate_cmd->add_option("--seeds", simulate.seeds, "per-run seeds")
        ->required()
        ->delimiter(',');
    simulate_cmd->add_option("--output,-o", simulate.output, "summary JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (centrality_cmd->parsed()) return cmd_centrality(centrality);
        if (curriculum_cmd->parsed()) return cmd_curriculum(curriculum, *curriculum_cmd);
        if (percolation_cmd->parsed()) return cmd_percolation(percolation);
        if (simulate_cmd->parsed()) return cmd_simulate(simulate);
    } catch (const ccl::InvalidParameterError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ccl::InvalidInputError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ccl::IoError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
