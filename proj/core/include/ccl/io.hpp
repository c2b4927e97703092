#ifndef CCL_IO_HPP_
#define CCL_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include <ccl/feature_set.hpp>

namespace ccl {

enum class FeatureFormat {
    auto_detect, // binary if the file starts with the CCFS magic, else CSV
    csv,
    binary,
};

/// Loads features from CSV (one row per point, optional header; a leading
/// `id` header column carries point ids) or from the CCFS binary layout
/// {magic "CCFS", u32 m, u32 d, m*d little-endian float32, row-major}.
/// Malformed input raises IoError naming the row (CSV) or byte offset
/// (binary).
FeatureSet load_features(const std::filesystem::path &path,
                         FeatureFormat format = FeatureFormat::auto_detect);

/// Writes CSV with an `id` column and x0..x{d-1} feature headers; values are
/// shortest round-trip representations, so a reload is bit-identical.
void save_features_csv(const std::filesystem::path &path, const FeatureSet &features);

/// Writes the CCFS binary layout. Ids are not stored; a reload numbers rows
/// 0..m-1.
void save_features_binary(const std::filesystem::path &path, const FeatureSet &features);

/// Whole file as a string; IoError when unreadable.
std::string read_file(const std::filesystem::path &path);

/// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

} // namespace ccl

#endif // CCL_IO_HPP_
