#ifndef CCL_GEOMETRY_HPP_
#define CCL_GEOMETRY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <ccl/feature_set.hpp>

namespace ccl {

struct EllipsoidOptions {
    double ridge = 0.0; // added to the covariance diagonal before decomposition
};

/// Sample-covariance ellipsoid of a point cloud: eigendecomposition plus the
/// quantities every packing formula needs. log_sqrt_det = (1/2) sum ln(lambda)
/// and chi_alpha1 is the largest Mahalanobis norm over the data, so the
/// ellipsoid of radius chi_alpha1 is the tightest one containing every point.
struct EllipsoidSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd eigenvalues;  // descending
    Eigen::MatrixXd eigenvectors; // columns aligned with eigenvalues
    double log_sqrt_det = 0.0;
    double chi_alpha1 = 0.0;

    Eigen::Index dim() const { return mean.size(); }
};

/// Data counts and packing counts over a grid of inner radii chi in
/// [0, chi_alpha1]: n_annulus[g] = #{x : maha(x) > chi_grid[g]} and
/// log_n_packing[g] the log annulus packing count at sphere radius epsilon.
struct PercolationCurve {
    std::vector<double> chi_grid; // ascending, chi_grid[0] = 0, back() = chi_alpha1
    double chi_alpha1 = 0.0;
    double epsilon = 0.0;
    std::vector<std::int64_t> n_annulus;
    std::vector<double> log_n_packing; // -inf allowed where the count is 0
    std::size_t critical_index = 0;    // steepest n_annulus step (left endpoint)
};

/// Fits the ellipsoid summary: sample mean, unbiased sample covariance
/// (plus optional ridge), symmetric eigendecomposition, chi_alpha1.
/// Throws RankDeficiencyError when eigenvalues are numerically zero.
EllipsoidSummary fit_ellipsoid(const FeatureSet &features, const EllipsoidOptions &options = {});

/// sqrt((x - mean)^T Sigma^{-1} (x - mean)) via the stored eigendecomposition.
double mahalanobis_norm(const Eigen::VectorXd &x, const EllipsoidSummary &summary);

/// Mahalanobis norm of every row, in row order.
std::vector<double> mahalanobis_norms(const FeatureSet &features,
                                      const EllipsoidSummary &summary);

/// ln N(E_chi) = d ln(chi/epsilon) + log_sqrt_det, the log of the number of
/// epsilon-spheres packed in the Mahalanobis ellipsoid of radius chi.
/// chi = 0 yields -infinity (a count of zero).
double packing_count_log(double chi, double epsilon, int d, double log_sqrt_det);

/// ln N(A) for the annulus between inner radius chi2 and outer radius chi1,
/// computed as a stable log-difference of packing counts.
double annulus_count_log(double chi1, double chi2, double epsilon, int d,
                         double log_sqrt_det);

/// N(A)/N(E_chi1) = 1 - (chi2/chi1)^d; independent of epsilon and Sigma.
double packing_ratio(double chi1, double chi2, int d);

/// Sphere radius that makes the full-ellipsoid packing count equal n:
/// ln eps = ln chi_alpha1 + (log_sqrt_det - ln n) / d.
double solve_epsilon(const EllipsoidSummary &summary, std::int64_t n);

/// ln Vol(E_chi) = ln(2/d) + (d/2) ln pi - lgamma(d/2) + d ln chi
/// + log_sqrt_det; the volume-quotient cross-check for packing counts.
double ellipsoid_volume_log(double chi, int d, double log_sqrt_det);

/// Index of the steepest discrete step: argmax_i |v[i+1] - v[i]|, ties going
/// to the smallest index. The index names the left endpoint of the step.
std::size_t critical_point(std::span<const double> values);

/// Full percolation sweep: uniform chi grid on [0, chi_alpha1], data counts,
/// packing counts at the oracle radius solve_epsilon(m), and the detected
/// critical point of the data-count curve.
PercolationCurve percolation_curve(const FeatureSet &features, int grid_size = 200,
                                   const EllipsoidOptions &options = {});

} // namespace ccl

#endif // CCL_GEOMETRY_HPP_
