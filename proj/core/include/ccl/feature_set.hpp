#ifndef CCL_FEATURE_SET_HPP_
#define CCL_FEATURE_SET_HPP_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace ccl {

/// Row-major float matrix; one feature vector per row.
using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// m points in d dimensions with stable integer identities. Immutable after
/// construction and safe to share read-only across threads.
class FeatureSet {
public:
    /// Takes ownership of `points`; ids must be unique and row-aligned.
    /// Throws InvalidParameterError / InvalidInputError on m < 2, d < 1,
    /// non-finite entries or duplicate ids.
    FeatureSet(RowMatrixF points, std::vector<std::int64_t> ids);

    /// Convenience: ids are the row indices 0..m-1.
    explicit FeatureSet(RowMatrixF points);

    Eigen::Index size() const { return points_.rows(); }
    Eigen::Index dim() const { return points_.cols(); }

    const RowMatrixF &points() const { return points_; }
    const std::vector<std::int64_t> &ids() const { return ids_; }

    std::int64_t id_of(Eigen::Index row) const { return ids_[static_cast<std::size_t>(row)]; }

    /// Row index of `id`; throws InvalidInputError for unknown ids.
    Eigen::Index row_of(std::int64_t id) const;
    bool has_id(std::int64_t id) const { return row_index_.count(id) != 0; }

private:
    void validate() const;

    RowMatrixF points_;
    std::vector<std::int64_t> ids_;
    std::unordered_map<std::int64_t, Eigen::Index> row_index_;
};

/// Rows of the listed ids, in list order, as a double matrix. Throws
/// InvalidInputError for ids not present in the feature set.
Eigen::MatrixXd gather_rows(const FeatureSet &features, std::span<const std::int64_t> ids);

} // namespace ccl

#endif // CCL_FEATURE_SET_HPP_
