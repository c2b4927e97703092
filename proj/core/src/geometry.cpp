#include <ccl/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include <ccl/errors.hpp>
#include <ccl/parallel.hpp>

namespace ccl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankTolerance = 1e-12;  // relative to the largest eigenvalue
constexpr Eigen::Index kPointBlock = 4096; // fixed so results ignore threading

void require_full_rank(const EllipsoidSummary &summary, const char *where) {
    const Eigen::Index d = summary.eigenvalues.size();
    if (d == 0) throw InvalidInputError(std::string(where) + ": empty summary");
    int null_dims = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (!(summary.eigenvalues[i] > 0.0)) ++null_dims;
    if (null_dims > 0 || !std::isfinite(summary.log_sqrt_det))
        throw RankDeficiencyError(std::string(where) +
                                      ": covariance summary is rank-deficient",
                                  null_dims);
}

void check_d(int d) {
    if (d < 1) throw InvalidParameterError("dimension must be at least 1");
}

// Rows of (X - mean) * V * diag(1/sqrt(lambda)); squared row norms are the
// squared Mahalanobis distances.
Eigen::MatrixXd whitening_map(const EllipsoidSummary &summary) {
    return summary.eigenvectors *
           summary.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
}

std::vector<double> mahalanobis_norms_impl(const FeatureSet &features,
                                           const EllipsoidSummary &summary,
                                           const Eigen::MatrixXd &whitener) {
    const Eigen::Index m = features.size();
    std::vector<double> norms(static_cast<std::size_t>(m));
    const Eigen::VectorXd &mean = summary.mean;
    const std::size_t block_count =
        static_cast<std::size_t>((m + kPointBlock - 1) / kPointBlock);
    parallel_for_blocks(block_count, [&](std::size_t block) {
        const Eigen::Index begin = static_cast<Eigen::Index>(block) * kPointBlock;
        const Eigen::Index rows = std::min(kPointBlock, m - begin);
        Eigen::MatrixXd centered =
            features.points().middleRows(begin, rows).cast<double>().rowwise() -
            mean.transpose();
        Eigen::MatrixXd mapped = centered * whitener;
        for (Eigen::Index r = 0; r < rows; ++r)
            norms[static_cast<std::size_t>(begin + r)] = mapped.row(r).norm();
    });
    return norms;
}

} // namespace

EllipsoidSummary fit_ellipsoid(const FeatureSet &features, const EllipsoidOptions &options) {
    if (options.ridge < 0.0 || !std::isfinite(options.ridge))
        throw InvalidParameterError("ridge must be finite and nonnegative");
    const Eigen::Index m = features.size();
    const Eigen::Index d = features.dim();

    EllipsoidSummary summary;
    summary.mean = Eigen::VectorXd::Zero(d);
    // Accumulate moments in fixed-size row blocks, serially, so the result is
    // one specific floating-point sum regardless of the thread budget.
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index begin = 0; begin < m; begin += kPointBlock) {
        const Eigen::Index rows = std::min(kPointBlock, m - begin);
        summary.mean += features.points()
                            .middleRows(begin, rows)
                            .cast<double>()
                            .colwise()
                            .sum()
                            .transpose();
    }
    summary.mean /= static_cast<double>(m);
    for (Eigen::Index begin = 0; begin < m; begin += kPointBlock) {
        const Eigen::Index rows = std::min(kPointBlock, m - begin);
        Eigen::MatrixXd centered =
            features.points().middleRows(begin, rows).cast<double>().rowwise() -
            summary.mean.transpose();
        scatter.noalias() += centered.transpose() * centered;
    }
    summary.covariance = scatter / static_cast<double>(m - 1);
    if (options.ridge > 0.0)
        summary.covariance.diagonal().array() += options.ridge;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(summary.covariance);
    if (solver.info() != Eigen::Success)
        throw DegenerateInputError("covariance eigendecomposition failed");
    // Eigen reports eigenvalues ascending; store them descending.
    summary.eigenvalues = solver.eigenvalues().reverse();
    summary.eigenvectors = solver.eigenvectors().rowwise().reverse();

    const double lambda_max = summary.eigenvalues[0];
    int null_dims = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        if (!(summary.eigenvalues[i] > kRankTolerance * lambda_max)) ++null_dims;
    if (null_dims > 0)
        throw RankDeficiencyError(
            "covariance is rank-deficient: " + std::to_string(null_dims) + " of " +
                std::to_string(d) +
                " dimensions carry no variance (consider the ridge option)",
            null_dims);

    summary.log_sqrt_det = 0.5 * summary.eigenvalues.array().log().sum();

    const Eigen::MatrixXd whitener = whitening_map(summary);
    const std::vector<double> norms = mahalanobis_norms_impl(features, summary, whitener);
    summary.chi_alpha1 = *std::max_element(norms.begin(), norms.end());
    return summary;
}

double mahalanobis_norm(const Eigen::VectorXd &x, const EllipsoidSummary &summary) {
    require_full_rank(summary, "mahalanobis_norm");
    if (x.size() != summary.dim())
        throw InvalidInputError("mahalanobis_norm: vector has dimension " +
                                std::to_string(x.size()) + ", summary expects " +
                                std::to_string(summary.dim()));
    const Eigen::VectorXd projected = summary.eigenvectors.transpose() * (x - summary.mean);
    const double sq = (projected.array().square() / summary.eigenvalues.array()).sum();
    return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

std::vector<double> mahalanobis_norms(const FeatureSet &features,
                                      const EllipsoidSummary &summary) {
    require_full_rank(summary, "mahalanobis_norms");
    if (features.dim() != summary.dim())
        throw InvalidInputError("mahalanobis_norms: dimension mismatch");
    return mahalanobis_norms_impl(features, summary, whitening_map(summary));
}

double packing_count_log(double chi, double epsilon, int d, double log_sqrt_det) {
    check_d(d);
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidParameterError("epsilon must be positive and finite");
    if (chi < 0.0 || !std::isfinite(chi))
        throw InvalidParameterError("chi must be finite and nonnegative");
    if (chi == 0.0) return -kInf;
    return d * (std::log(chi) - std::log(epsilon)) + log_sqrt_det;
}

double annulus_count_log(double chi1, double chi2, double epsilon, int d,
                         double log_sqrt_det) {
    check_d(d);
    if (chi2 < 0.0 || chi2 > chi1 || !std::isfinite(chi1))
        throw InvalidParameterError("annulus radii must satisfy 0 <= chi2 <= chi1");
    if (chi1 == chi2) return -kInf; // empty annulus, also covers chi1 == 0
    const double outer = packing_count_log(chi1, epsilon, d, log_sqrt_det);
    if (chi2 == 0.0) return outer;
    // N(A) = N(E1)(1 - (chi2/chi1)^d), with the second factor via log1p.
    return outer + std::log1p(-std::exp(d * (std::log(chi2) - std::log(chi1))));
}

double packing_ratio(double chi1, double chi2, int d) {
    check_d(d);
    if (!(chi1 > 0.0) || chi2 < 0.0 || chi2 > chi1)
        throw InvalidParameterError("packing_ratio requires 0 <= chi2 <= chi1, chi1 > 0");
    return -std::expm1(d * (std::log(chi2) - std::log(chi1)));
}

double solve_epsilon(const EllipsoidSummary &summary, std::int64_t n) {
    require_full_rank(summary, "solve_epsilon");
    if (n < 1) throw InvalidParameterError("sphere count n must be at least 1");
    if (!(summary.chi_alpha1 > 0.0))
        throw DegenerateInputError("solve_epsilon needs chi_alpha1 > 0");
    const double d = static_cast<double>(summary.dim());
    return std::exp(std::log(summary.chi_alpha1) +
                    (summary.log_sqrt_det - std::log(static_cast<double>(n))) / d);
}

double ellipsoid_volume_log(double chi, int d, double log_sqrt_det) {
    check_d(d);
    if (chi < 0.0) throw InvalidParameterError("chi must be nonnegative");
    if (chi == 0.0) return -kInf;
    const double half_d = 0.5 * d;
    return std::log(2.0) - std::log(static_cast<double>(d)) +
           half_d * std::log(std::numbers::pi) - std::lgamma(half_d) +
           d * std::log(chi) + log_sqrt_det;
}

std::size_t critical_point(std::span<const double> values) {
    if (values.size() < 2)
        throw InvalidParameterError("critical_point needs at least 2 values");
    std::size_t best = 0;
    double best_step = -1.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double step = std::abs(values[i + 1] - values[i]);
        if (step > best_step) {
            best_step = step;
            best = i;
        }
    }
    return best;
}

PercolationCurve percolation_curve(const FeatureSet &features, int grid_size,
                                   const EllipsoidOptions &options) {
    if (grid_size < 3) throw InvalidParameterError("grid_size must be at least 3");

    const EllipsoidSummary summary = fit_ellipsoid(features, options);
    const std::vector<double> norms =
        mahalanobis_norms_impl(features, summary, whitening_map(summary));

    PercolationCurve curve;
    curve.chi_alpha1 = summary.chi_alpha1;
    curve.epsilon = solve_epsilon(summary, features.size());
    curve.chi_grid.resize(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g)
        curve.chi_grid[static_cast<std::size_t>(g)] =
            summary.chi_alpha1 * static_cast<double>(g) / static_cast<double>(grid_size - 1);
    curve.chi_grid.back() = summary.chi_alpha1; // exact at the boundary

    // A point with norm r lies strictly outside every grid radius < r, i.e.
    // outside the first lower_bound(grid, r) of them. Histogram those prefix
    // lengths, then suffix-sum: integer arithmetic, no order sensitivity.
    std::vector<std::int64_t> hist(static_cast<std::size_t>(grid_size) + 1, 0);
    for (double r : norms) {
        const auto idx = static_cast<std::size_t>(
            std::lower_bound(curve.chi_grid.begin(), curve.chi_grid.end(), r) -
            curve.chi_grid.begin());
        ++hist[idx];
    }
    curve.n_annulus.assign(static_cast<std::size_t>(grid_size), 0);
    std::int64_t outside = 0;
    for (int g = grid_size - 1; g >= 0; --g) {
        outside += hist[static_cast<std::size_t>(g) + 1];
        curve.n_annulus[static_cast<std::size_t>(g)] = outside;
    }

    const int d = static_cast<int>(features.dim());
    curve.log_n_packing.resize(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g)
        curve.log_n_packing[static_cast<std::size_t>(g)] =
            annulus_count_log(summary.chi_alpha1, curve.chi_grid[static_cast<std::size_t>(g)],
                              curve.epsilon, d, summary.log_sqrt_det);

    std::vector<double> annulus_real(curve.n_annulus.begin(), curve.n_annulus.end());
    curve.critical_index = critical_point(annulus_real);
    return curve;
}

} // namespace ccl
