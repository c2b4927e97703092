#ifndef CCL_SIMULATION_HPP_
#define CCL_SIMULATION_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <ccl/curriculum.hpp>
#include <ccl/feature_set.hpp>

namespace ccl {

struct ClusterSpec {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance; // isotropic specs are expanded at parse time
    std::int64_t count = 0;
};

/// Uniform outliers drawn per coordinate from [box_min, box_max).
struct NoiseSpec {
    std::int64_t count = 0;
    Eigen::VectorXd box_min;
    Eigen::VectorXd box_max;
};

struct SyntheticSpec {
    int dim = 0;
    std::vector<ClusterSpec> clusters;
    std::optional<NoiseSpec> noise;
    std::uint64_t seed = 0;

    std::int64_t cluster_count() const {
        std::int64_t n = 0;
        for (const auto &c : clusters) n += c.count;
        return n;
    }
    std::int64_t total_count() const {
        return cluster_count() + (noise ? noise->count : 0);
    }
};

/// Generated points plus ground truth: labels[i] is the cluster index of row
/// i, or -1 for noise. Labels are for evaluation only; curriculum logic never
/// sees them.
struct LabeledData {
    FeatureSet features;
    std::vector<std::int32_t> labels;
};

/// Deterministic sampler for a SyntheticSpec: cluster points first (Cholesky
/// of each covariance), then noise, ids 0..m-1.
LabeledData generate_synthetic(const SyntheticSpec &spec);

/// A clean sample from the spec's cluster components only (noise skipped),
/// with the same per-cluster counts; used as the held-out scoring reference.
FeatureSet generate_reference(const SyntheticSpec &spec, std::uint64_t seed);

/// First two moments of a fitted model's distribution.
struct GaussianMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

/// Model states that can report Gaussian moments; the Fréchet metric scores
/// any such state.
class MomentModelState : public ModelState {
public:
    virtual GaussianMoments moments() const = 0;
};

class GaussianModelState final : public MomentModelState {
public:
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance; // eigenvalues >= the trainer's ridge floor
    std::int64_t fitted_count = 0;

    GaussianMoments moments() const override { return {mean, covariance}; }
};

class GmmModelState final : public MomentModelState {
public:
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
    std::int64_t fitted_count = 0;
    int iterations = 0;
    bool converged = false;

    /// Mixture moments: mean = sum w_k mu_k and covariance
    /// sum w_k (Sigma_k + (mu_k - mean)(mu_k - mean)^T).
    GaussianMoments moments() const override;
};

/// Closed-form Gaussian maximum-likelihood fit: sample mean plus unbiased
/// sample covariance with eigenvalues clamped from below at ridge_floor.
/// Deterministic and independent of `seed`; the warm start is accepted and
/// ignored, since the exact fit cannot benefit from one.
class GaussianTrainer final : public Trainer {
public:
    explicit GaussianTrainer(double ridge_floor = 1e-6);

    bool supports_warm_start() const override { return true; }
    std::unique_ptr<ModelState> train(const FeatureSet &features,
                                      std::span<const std::int64_t> ids,
                                      const ModelState *warm_start,
                                      std::uint64_t seed) const override;

private:
    double ridge_floor_;
};

/// Gaussian mixture fitted by EM: k-means++ seeding (or the warm-start state
/// when given), at most 100 iterations, stopping when the mean log-likelihood
/// moves by less than 1e-8. Covariance eigenvalues are clamped at ridge_floor
/// after every M-step.
class GmmTrainer final : public Trainer {
public:
    explicit GmmTrainer(int components, double ridge_floor = 1e-6);

    bool supports_warm_start() const override { return true; }
    std::unique_ptr<ModelState> train(const FeatureSet &features,
                                      std::span<const std::int64_t> ids,
                                      const ModelState *warm_start,
                                      std::uint64_t seed) const override;

    int components() const { return components_; }

private:
    int components_;
    double ridge_floor_;
};

/// Squared Fréchet (2-Wasserstein) distance between Gaussians:
/// |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}).
double frechet_distance(const GaussianMoments &a, const GaussianMoments &b);
double frechet_distance(const GaussianModelState &a, const GaussianModelState &b);

/// frechet_distance(model moments, Gaussian fit of the reference set).
double score_against_reference(const ModelState &model, const FeatureSet &reference);

/// QualityMetric closure over a reference set; fits the reference once.
QualityMetric make_reference_metric(const FeatureSet &reference);

/// True when the curve has an interior minimum strictly below both endpoints.
bool is_v_shaped(const ScoreCurve &curve);

struct VshapeResult {
    std::vector<std::uint64_t> seeds;
    double fraction_v_shaped = 0.0;
    double mean_optimal_stage = 0.0;
    std::vector<std::int64_t> optimal_stage_histogram; // indexed by stage
    std::vector<ScoreCurve> curves;                    // one per seed
};

/// Full pipeline per seed: generate data, rank by centrality, build the
/// schedule, run normal-mode training with the Gaussian trainer scored
/// against a clean reference sample; aggregates V-shape statistics.
VshapeResult vshape_experiment(const SyntheticSpec &spec, std::int64_t base_size,
                               std::int64_t increment,
                               std::span<const std::uint64_t> seeds);

} // namespace ccl

#endif // CCL_SIMULATION_HPP_
