#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <ccl/feature_set.hpp>
#include <ccl/io.hpp>
#include <ccl/knn.hpp>
#include <ccl/schema.hpp>
#include <ccl/serialize.hpp>

#include "support/helpers.hpp"

using ccl::tests::CommandResult;
using ccl::tests::gaussian_cloud;
using ccl::tests::run_command;
using ccl::tests::TempDir;
using nlohmann::json;

namespace {

const std::string kCli = CCL_CLI_PATH;

json schema(const std::string &name) {
    return json::parse(ccl::read_file(std::string(CCL_SCHEMA_DIR) + "/" + name));
}

json read_json(const std::filesystem::path &path) {
    return json::parse(ccl::read_file(path));
}

std::string write_cloud_csv(TempDir &dir, const char *name, Eigen::Index m, Eigen::Index d,
                            std::uint64_t seed) {
    const auto path = dir.file(name);
    ccl::save_features_csv(path, gaussian_cloud(m, d, seed));
    return path.string();
}

/// Runs centrality on `csv` and returns the ranking JSON path.
std::string make_ranking(TempDir &dir, const std::string &csv) {
    const std::string ranking = dir.file("ranking.json").string();
    const CommandResult result =
        run_command(kCli + " centrality --input " + csv + " --output " + ranking);
    REQUIRE(result.exit_code == 0);
    return ranking;
}

std::size_t count_lines(const std::string &text) {
    std::size_t lines = 0;
    for (const char c : text) {
        lines += c == '\n' ? 1 : 0;
    }
    return lines;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help requests succeed") {
    CHECK(run_command(kCli + " --help").exit_code == 0);
    const CommandResult sub = run_command(kCli + " centrality --help");
    CHECK(sub.exit_code == 0);
    CHECK(sub.output.find("--input") != std::string::npos);
}

TEST_CASE("missing or unknown subcommands are usage errors") {
    CHECK(run_command(kCli).exit_code == 2);
    CHECK(run_command(kCli + " frobnicate").exit_code == 2);
}

TEST_CASE("centrality produces a schema-valid ranking, graph dump and stable bytes") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 80, 4, 3);
    const std::string out = dir.file("ranking.json").string();
    const std::string graph = dir.file("graph.csv").string();
    const std::string cmd = kCli + " centrality --input " + csv + " --output " + out +
                            " --dump-graph " + graph;

    const CommandResult first = run_command(cmd);
    REQUIRE(first.exit_code == 0);
    CHECK(first.output.find("centrality: m=80 k=18") != std::string::npos);
    CHECK(first.output.find("variant=plain") != std::string::npos);

    const json doc = read_json(out);
    CHECK(ccl::validate_schema(schema("centrality.schema.json"), doc).empty());
    const auto entries = ccl::ranking_from_json(doc);
    CHECK(entries.size() == 80);

    const std::string graph_text = ccl::read_file(graph);
    CHECK(graph_text.rfind("source_id,target_id,distance,weight\n", 0) == 0);
    CHECK(count_lines(graph_text) == 1 + 80 * static_cast<std::size_t>(ccl::default_k(80)));

    // Identical invocation, identical bytes.
    const std::string ranking_bytes = ccl::read_file(out);
    const CommandResult second = run_command(cmd);
    REQUIRE(second.exit_code == 0);
    CHECK(second.output == first.output);
    CHECK(ccl::read_file(out) == ranking_bytes);
    CHECK(ccl::read_file(graph) == graph_text);
}

TEST_CASE("centrality output does not depend on the thread budget") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 120, 6, 9);
    const std::string out = dir.file("ranking.json").string();
    const std::string tail = " centrality --input " + csv + " --output " + out;

    REQUIRE(run_command("CC_THREADS=1 " + kCli + tail).exit_code == 0);
    const std::string serial = ccl::read_file(out);
    REQUIRE(run_command("CC_THREADS=7 " + kCli + tail).exit_code == 0);
    CHECK(ccl::read_file(out) == serial);
}

TEST_CASE("centrality accepts binary features explicitly or by detection") {
    TempDir dir;
    const auto bin = dir.file("cloud.bin");
    ccl::save_features_binary(bin, gaussian_cloud(60, 3, 12));
    const std::string out_explicit = dir.file("explicit.json").string();
    const std::string out_auto = dir.file("auto.json").string();

    const CommandResult explicit_run = run_command(
        kCli + " centrality --input " + bin.string() + " --format bin --k 5 --output " +
        out_explicit);
    REQUIRE(explicit_run.exit_code == 0);
    CHECK(explicit_run.output.find("k=5") != std::string::npos);

    REQUIRE(run_command(kCli + " centrality --input " + bin.string() + " --k 5 --output " +
                        out_auto)
                .exit_code == 0);
    CHECK(ccl::read_file(out_auto) == ccl::read_file(out_explicit));
}

TEST_CASE("centrality usage and input failures exit 2") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 20, 2, 1);

    CHECK(run_command(kCli + " centrality").exit_code == 2);
    CHECK(run_command(kCli + " centrality --input " + csv + " --format xml").exit_code == 2);
    CHECK(run_command(kCli + " centrality --input " + csv + " --k 0").exit_code == 2);
    CHECK(run_command(kCli + " centrality --input " + csv + " --k -4").exit_code == 2);
    CHECK(run_command(kCli + " centrality --input " + csv + " --k 20").exit_code == 2);
    CHECK(run_command(kCli + " centrality --input " + dir.file("absent.csv").string())
              .exit_code == 2);
    CHECK(run_command(kCli + " centrality --input " + csv + " --target-geomean 1.5")
              .exit_code == 2);

    const auto broken = dir.file("broken.csv");
    std::ofstream(broken) << "x,y\n1,2\n3\n";
    CHECK(run_command(kCli + " centrality --input " + broken.string()).exit_code == 2);
}

TEST_CASE("degenerate geometry and failed convergence exit 3") {
    TempDir dir;

    const auto constant = dir.file("constant.csv");
    std::ofstream(constant) << "x,y\n1,1\n1,1\n1,1\n";
    CHECK(run_command(kCli + " centrality --input " + constant.string()).exit_code == 3);

    const std::string csv = write_cloud_csv(dir, "cloud.csv", 40, 3, 2);
    const CommandResult starved =
        run_command(kCli + " centrality --input " + csv + " --max-iters 1");
    CHECK(starved.exit_code == 3);
    CHECK(starved.output.find("error:") != std::string::npos);
}

TEST_CASE("curriculum normal mode writes schema-valid schedule and curve") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 100, 3, 21);
    const std::string ranking = make_ranking(dir, csv);
    const std::string curve_path = dir.file("curve.json").string();
    const std::string schedule_path = dir.file("schedule.json").string();
    const std::string cmd = kCli + " curriculum --features " + csv + " --ranking " + ranking +
                            " --base 20 --increment 20 --seed 4 --output " + curve_path +
                            " --schedule-output " + schedule_path;

    const CommandResult result = run_command(cmd);
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("optimal stage") != std::string::npos);

    const json curve = read_json(curve_path);
    CHECK(ccl::validate_schema(schema("curve.schema.json"), curve).empty());
    CHECK(curve["mode"] == "normal");
    CHECK(curve["seed"] == 4);
    REQUIRE(curve["cumulative_sizes"].size() == 5);
    CHECK(curve["cumulative_sizes"][0] == 20);
    CHECK(curve["cumulative_sizes"][4] == 100);

    const json schedule = read_json(schedule_path);
    CHECK(ccl::validate_schema(schema("schedule.schema.json"), schedule).empty());
    CHECK(schedule["base_size"] == 20);
    CHECK(schedule["stages"].size() == 5);

    // The schedule's stage order is the ranking order.
    const auto entries = ccl::ranking_from_json(read_json(ranking));
    std::vector<std::int64_t> flattened;
    for (const auto &stage : schedule["stages"]) {
        for (const auto &id : stage) {
            flattened.push_back(id.get<std::int64_t>());
        }
    }
    REQUIRE(flattened.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(flattened[i] == entries[i].id);
    }

    const std::string curve_bytes = ccl::read_file(curve_path);
    const std::string schedule_bytes = ccl::read_file(schedule_path);
    REQUIRE(run_command(cmd).exit_code == 0);
    CHECK(ccl::read_file(curve_path) == curve_bytes);
    CHECK(ccl::read_file(schedule_path) == schedule_bytes);
}

TEST_CASE("curriculum active mode trains on fixed-size active sets") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 100, 3, 22);
    const std::string ranking = make_ranking(dir, csv);
    const std::string curve_path = dir.file("curve.json").string();
    const std::string cmd = kCli + " curriculum --features " + csv + " --ranking " + ranking +
                            " --base 20 --increment 20 --mode active --active-size 40" +
                            " --output " + curve_path + " --schedule-output " +
                            dir.file("schedule.json").string();

    const CommandResult result = run_command(cmd);
    REQUIRE(result.exit_code == 0);

    const json curve = read_json(curve_path);
    CHECK(ccl::validate_schema(schema("curve.schema.json"), curve).empty());
    CHECK(curve["mode"] == "active_set");

    const std::string bytes = ccl::read_file(curve_path);
    REQUIRE(run_command(cmd).exit_code == 0);
    CHECK(ccl::read_file(curve_path) == bytes);
}

TEST_CASE("curriculum supports the mixture trainer") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 90, 2, 23);
    const std::string ranking = make_ranking(dir, csv);
    const std::string curve_path = dir.file("curve.json").string();

    const CommandResult result = run_command(
        kCli + " curriculum --features " + csv + " --ranking " + ranking +
        " --base 30 --increment 30 --trainer gmm --gmm-components 2 --output " + curve_path +
        " --schedule-output " + dir.file("schedule.json").string());
    REQUIRE(result.exit_code == 0);
    CHECK(ccl::validate_schema(schema("curve.schema.json"), read_json(curve_path)).empty());
}

TEST_CASE("curriculum honors --reference for scoring") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 80, 3, 24);
    const std::string reference = write_cloud_csv(dir, "reference.csv", 80, 3, 25);
    const std::string ranking = make_ranking(dir, csv);
    const std::string without_ref = dir.file("plain.json").string();
    const std::string with_ref = dir.file("referenced.json").string();
    const std::string stem = kCli + " curriculum --features " + csv + " --ranking " + ranking +
                             " --base 20 --increment 30 --schedule-output " +
                             dir.file("schedule.json").string();

    REQUIRE(run_command(stem + " --output " + without_ref).exit_code == 0);
    REQUIRE(run_command(stem + " --reference " + reference + " --output " + with_ref)
                .exit_code == 0);
    CHECK(ccl::read_file(without_ref) != ccl::read_file(with_ref));
}

TEST_CASE("curriculum config file fills defaults but flags win") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 60, 2, 26);
    const std::string ranking = make_ranking(dir, csv);
    const auto config = dir.file("config.json");
    std::ofstream(config) << R"({"base_size": 20, "increment": 10, "seed": 9})";
    const std::string schedule_path = dir.file("schedule.json").string();
    const std::string stem = kCli + " curriculum --features " + csv + " --ranking " + ranking +
                             " --config " + config.string() + " --output " +
                             dir.file("curve.json").string() + " --schedule-output " +
                             schedule_path;

    REQUIRE(run_command(stem).exit_code == 0);
    CHECK(read_json(schedule_path)["base_size"] == 20);

    REQUIRE(run_command(stem + " --base 30").exit_code == 0);
    CHECK(read_json(schedule_path)["base_size"] == 30);

    const auto bad_config = dir.file("bad_config.json");
    std::ofstream(bad_config) << R"({"base_size": 20, "increment": 10, "mystery": 1})";
    CHECK(run_command(kCli + " curriculum --features " + csv + " --ranking " + ranking +
                      " --config " + bad_config.string())
              .exit_code == 2);
}

TEST_CASE("curriculum validation failures exit 2") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 60, 2, 27);
    const std::string ranking = make_ranking(dir, csv);
    const std::string stem = kCli + " curriculum --features " + csv + " --ranking " + ranking;

    CHECK(run_command(stem + " --base 20 --increment 10 --mode active").exit_code == 2);
    CHECK(run_command(stem + " --base 20 --increment 10 --mode turbo").exit_code == 2);
    CHECK(run_command(stem + " --base 20 --increment 10 --metric ks").exit_code == 2);
    CHECK(run_command(stem + " --base 20 --increment 10 --trainer forest").exit_code == 2);
    CHECK(run_command(stem + " --base 0 --increment 10").exit_code == 2);
    CHECK(run_command(stem + " --base 20 --increment 100").exit_code == 2);

    // Ranking/file mismatches.
    const std::string other_csv = write_cloud_csv(dir, "other.csv", 40, 2, 28);
    CHECK(run_command(kCli + " curriculum --features " + other_csv + " --ranking " + ranking +
                      " --base 10 --increment 10")
              .exit_code == 2);

    json alien = read_json(ranking);
    alien[0]["id"] = 5000;
    const auto alien_path = dir.file("alien.json");
    std::ofstream(alien_path) << alien.dump();
    CHECK(run_command(kCli + " curriculum --features " + csv + " --ranking " +
                      alien_path.string() + " --base 10 --increment 10")
              .exit_code == 2);

    const auto not_json = dir.file("ranking.txt");
    std::ofstream(not_json) << "not json";
    CHECK(run_command(kCli + " curriculum --features " + csv + " --ranking " +
                      not_json.string() + " --base 10 --increment 10")
              .exit_code == 2);
}

TEST_CASE("percolation writes a schema-valid curve and respects the ridge option") {
    TempDir dir;
    const std::string csv = write_cloud_csv(dir, "cloud.csv", 150, 4, 30);
    const std::string out = dir.file("percolation.json").string();
    const std::string cmd =
        kCli + " percolation --input " + csv + " --grid-size 64 --output " + out;

    const CommandResult result = run_command(cmd);
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("critical chi=") != std::string::npos);

    const json doc = read_json(out);
    CHECK(ccl::validate_schema(schema("percolation.schema.json"), doc).empty());
    REQUIRE(doc["chi_grid"].size() == 64);
    CHECK(doc["n_annulus"][0] == 150);
    CHECK(doc["log_n_packing"].back().is_null());

    const std::string bytes = ccl::read_file(out);
    REQUIRE(run_command(cmd).exit_code == 0);
    CHECK(ccl::read_file(out) == bytes);

    CHECK(run_command(kCli + " percolation --input " + csv + " --grid-size 2").exit_code == 2);

    // A flat coordinate needs the ridge to become full-rank.
    const auto flat = dir.file("flat.csv");
    std::ofstream(flat) << "x,y\n1,5\n2,5\n3,5\n4,5\n";
    CHECK(run_command(kCli + " percolation --input " + flat.string()).exit_code == 3);
    CHECK(run_command(kCli + " percolation --input " + flat.string() + " --ridge 0.001" +
                      " --output " + dir.file("ridged.json").string())
              .exit_code == 0);
}

TEST_CASE("simulate runs the bundled noisy spec and writes a schema-valid summary") {
    TempDir dir;
    const std::string spec = std::string(CCL_SPEC_DIR) + "/noisy_mixture.json";
    const std::string out = dir.file("summary.json").string();
    const std::string cmd = kCli + " simulate --spec " + spec +
                            " --base 200 --increment 200 --seeds 1,2 --output " + out;

    const CommandResult result = run_command(cmd);
    REQUIRE(result.exit_code == 0);
    CHECK(result.output.find("seeds=2") != std::string::npos);

    const json doc = read_json(out);
    CHECK(ccl::validate_schema(schema("summary.schema.json"), doc).empty());
    CHECK(doc["seeds"] == json::array({1, 2}));
    REQUIRE(doc["curves"].size() == 2);
    CHECK(doc["curves"][0]["cumulative_sizes"].back() == 1000);

    const std::string bytes = ccl::read_file(out);
    REQUIRE(run_command(cmd).exit_code == 0);
    CHECK(ccl::read_file(out) == bytes);
}

TEST_CASE("simulate validation failures exit 2") {
    TempDir dir;
    const std::string spec = std::string(CCL_SPEC_DIR) + "/noisy_mixture.json";

    CHECK(run_command(kCli + " simulate --spec " + spec + " --base 200 --increment 200")
              .exit_code == 2);
    CHECK(run_command(kCli + " simulate --spec " + dir.file("nope.json").string() +
                      " --base 200 --increment 200 --seeds 1")
              .exit_code == 2);
    CHECK(run_command(kCli + " simulate --spec " + spec +
                      " --base 2000 --increment 200 --seeds 1")
              .exit_code == 2);

    const auto bad_spec = dir.file("bad_spec.json");
    std::ofstream(bad_spec) << R"({"dim": 2, "clusters": [], "bogus": true})";
    CHECK(run_command(kCli + " simulate --spec " + bad_spec.string() +
                      " --base 10 --increment 10 --seeds 1")
              .exit_code == 2);
}

} // TEST_SUITE
