#ifndef CCL_TESTS_HELPERS_HPP_
#define CCL_TESTS_HELPERS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <ccl/feature_set.hpp>
#include <ccl/rng.hpp>

namespace ccl::tests {

/// Unique writable directory removed (recursively) on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::filesystem::path file(const std::string &name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// m standard-normal points in d dimensions, ids 0..m-1.
FeatureSet gaussian_cloud(std::int64_t m, int d, std::uint64_t seed);

/// A tight Gaussian blob plus uniform box outliers; outlier rows come last.
/// Returns the feature set and the number of cluster (non-outlier) points.
struct CloudWithOutliers {
    FeatureSet features;
    std::int64_t cluster_count;
};
CloudWithOutliers cloud_with_outliers(std::int64_t cluster_m, std::int64_t outlier_m, int d,
                                      double box_half_width, std::uint64_t seed);

/// Feature set from a row-major list of doubles (narrowed to float).
FeatureSet features_from_rows(const std::vector<std::vector<double>> &rows);
FeatureSet features_from_rows(const std::vector<std::vector<double>> &rows,
                              std::vector<std::int64_t> ids);

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout + stderr, interleaved
};

/// Runs a shell command, capturing combined output and the exit code.
CommandResult run_command(const std::string &command);

} // namespace ccl::tests

#endif // CCL_TESTS_HELPERS_HPP_
