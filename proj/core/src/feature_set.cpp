#include <ccl/feature_set.hpp>

#include <cmath>
#include <numeric>
#include <string>

#include <ccl/errors.hpp>

namespace ccl {

FeatureSet::FeatureSet(RowMatrixF points, std::vector<std::int64_t> ids)
    : points_(std::move(points)), ids_(std::move(ids)) {
    validate();
    row_index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        auto [it, inserted] = row_index_.emplace(ids_[i], static_cast<Eigen::Index>(i));
        if (!inserted) {
            throw InvalidInputError("duplicate id " + std::to_string(ids_[i]) + " at row " +
                                    std::to_string(i));
        }
    }
}

FeatureSet::FeatureSet(RowMatrixF points) {
    std::vector<std::int64_t> ids(static_cast<std::size_t>(points.rows()));
    std::iota(ids.begin(), ids.end(), std::int64_t{0});
    *this = FeatureSet(std::move(points), std::move(ids));
}

Eigen::Index FeatureSet::row_of(std::int64_t id) const {
    const auto it = row_index_.find(id);
    if (it == row_index_.end()) {
        throw InvalidInputError("unknown id " + std::to_string(id));
    }
    return it->second;
}

Eigen::MatrixXd gather_rows(const FeatureSet &features, std::span<const std::int64_t> ids) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(ids.size()), features.dim());
    for (std::size_t i = 0; i < ids.size(); ++i)
        rows.row(static_cast<Eigen::Index>(i)) =
            features.points().row(features.row_of(ids[i])).cast<double>();
    return rows;
}

void FeatureSet::validate() const {
    if (points_.rows() < 2) throw InvalidParameterError("feature set needs m >= 2 points");
    if (points_.cols() < 1) throw InvalidParameterError("feature set needs d >= 1 dimensions");
    if (static_cast<Eigen::Index>(ids_.size()) != points_.rows()) {
        throw InvalidParameterError("ids must be aligned with feature rows");
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        for (Eigen::Index j = 0; j < points_.cols(); ++j) {
            if (!std::isfinite(points_(i, j))) {
                throw InvalidInputError("non-finite feature value at row " + std::to_string(i) +
                                        ", column " + std::to_string(j));
            }
        }
    }
}

} // namespace ccl
