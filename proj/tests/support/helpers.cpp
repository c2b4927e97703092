#include "helpers.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include <sys/wait.h>

namespace ccl::tests {

TempDir::TempDir() {
    const std::filesystem::path base = std::filesystem::temp_directory_path();
    std::string name = (base / "ccl-test-XXXXXX").string();
    if (::mkdtemp(name.data()) == nullptr)
        throw std::runtime_error("mkdtemp failed for " + name);
    path_ = name;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

FeatureSet gaussian_cloud(std::int64_t m, int d, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrixF points(m, d);
    for (std::int64_t i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j)
            points(i, j) = static_cast<float>(rng.normal());
    return FeatureSet(std::move(points));
}

CloudWithOutliers cloud_with_outliers(std::int64_t cluster_m, std::int64_t outlier_m, int d,
                                      double box_half_width, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrixF points(cluster_m + outlier_m, d);
    for (std::int64_t i = 0; i < cluster_m; ++i)
        for (int j = 0; j < d; ++j)
            points(i, j) = static_cast<float>(rng.normal());
    for (std::int64_t i = cluster_m; i < cluster_m + outlier_m; ++i)
        for (int j = 0; j < d; ++j)
            points(i, j) =
                static_cast<float>(rng.uniform(-box_half_width, box_half_width));
    return {FeatureSet(std::move(points)), cluster_m};
}

FeatureSet features_from_rows(const std::vector<std::vector<double>> &rows) {
    std::vector<std::int64_t> ids(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) ids[i] = static_cast<std::int64_t>(i);
    return features_from_rows(rows, std::move(ids));
}

FeatureSet features_from_rows(const std::vector<std::vector<double>> &rows,
                              std::vector<std::int64_t> ids) {
    if (rows.empty()) throw std::runtime_error("features_from_rows: no rows");
    RowMatrixF points(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size())
            throw std::runtime_error("features_from_rows: ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                static_cast<float>(rows[i][j]);
    }
    return FeatureSet(std::move(points), std::move(ids));
}

CommandResult run_command(const std::string &command) {
    CommandResult result;
    const std::string wrapped = command + " 2>&1";
    FILE *pipe = ::popen(wrapped.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed: " + command);
    std::array<char, 4096> buffer;
    std::size_t got;
    while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
        result.output.append(buffer.data(), got);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else
        result.exit_code = -1;
    return result;
}

} // namespace ccl::tests
