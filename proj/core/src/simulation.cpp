#include <ccl/simulation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <ccl/centrality.hpp>
#include <ccl/errors.hpp>
#include <ccl/graph.hpp>
#include <ccl/knn.hpp>
#include <ccl/rng.hpp>

namespace ccl {
namespace {

// Sub-seed streams of a per-run seed, so data, reference and training draws
// never share random state.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kReferenceStream = 2;
constexpr std::uint64_t kTrainStream = 3;

void validate_spec(const SyntheticSpec &spec) {
    if (spec.dim < 1) throw InvalidParameterError("spec dimension must be at least 1");
    for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
        const ClusterSpec &cluster = spec.clusters[c];
        if (cluster.count < 1)
            throw InvalidParameterError("cluster " + std::to_string(c) +
                                        " has a nonpositive count");
        if (cluster.mean.size() != spec.dim ||
            cluster.covariance.rows() != spec.dim || cluster.covariance.cols() != spec.dim)
            throw InvalidParameterError("cluster " + std::to_string(c) +
                                        " has mismatched dimensions");
    }
    if (spec.noise) {
        const NoiseSpec &noise = *spec.noise;
        if (noise.count < 0) throw InvalidParameterError("noise count must be nonnegative");
        if (noise.box_min.size() != spec.dim || noise.box_max.size() != spec.dim)
            throw InvalidParameterError("noise box has mismatched dimensions");
        for (int j = 0; j < spec.dim; ++j)
            if (!(noise.box_min[j] < noise.box_max[j]))
                throw InvalidParameterError("noise box is empty along dimension " +
                                            std::to_string(j));
        if (noise.count > 0) {
            for (std::size_t c = 0; c < spec.clusters.size(); ++c)
                for (int j = 0; j < spec.dim; ++j)
                    if (spec.clusters[c].mean[j] < noise.box_min[j] ||
                        spec.clusters[c].mean[j] > noise.box_max[j])
                        throw InvalidParameterError("noise box does not enclose the mean of cluster " +
                                                    std::to_string(c));
        }
    }
    if (spec.total_count() < 2)
        throw InvalidParameterError("spec must generate at least 2 points");
}

// Draws `count` samples of N(mean, covariance) into rows [row, row+count).
void sample_cluster(RowMatrixF &points, Eigen::Index row, const ClusterSpec &cluster,
                    Rng &rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(cluster.covariance);
    if (llt.info() != Eigen::Success)
        throw InvalidParameterError("cluster covariance is not positive-definite");
    const Eigen::MatrixXd chol = llt.matrixL();
    const auto d = static_cast<Eigen::Index>(cluster.mean.size());
    Eigen::VectorXd z(d);
    for (std::int64_t i = 0; i < cluster.count; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
        points.row(row + i) = (cluster.mean + chol * z).transpose().cast<float>();
    }
}

// Unbiased sample covariance with eigenvalues clamped at `floor`; the clamp
// keeps every fit usable as an SPD Gaussian even for tiny subsets.
GaussianModelState fit_gaussian(const Eigen::MatrixXd &rows, double floor) {
    GaussianModelState state;
    const Eigen::Index n = rows.rows();
    state.fitted_count = n;
    state.mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - state.mean.transpose();
    if (n > 1)
        state.covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
    else
        state.covariance = Eigen::MatrixXd::Zero(rows.cols(), rows.cols());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(state.covariance);
    if (solver.info() != Eigen::Success)
        throw DegenerateInputError("covariance eigendecomposition failed");
    const Eigen::VectorXd clamped = solver.eigenvalues().cwiseMax(floor);
    state.covariance = solver.eigenvectors() * clamped.asDiagonal() *
                       solver.eigenvectors().transpose();
    state.covariance = 0.5 * (state.covariance + state.covariance.transpose()).eval();
    return state;
}

void require_moments(const GaussianMoments &g, const char *side) {
    if (g.mean.size() != g.covariance.rows() || g.covariance.rows() != g.covariance.cols())
        throw InvalidInputError(std::string("frechet_distance: malformed ") + side +
                                " moments");
    const double scale = std::max(1.0, g.covariance.cwiseAbs().maxCoeff());
    if ((g.covariance - g.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw InvalidInputError(std::string("frechet_distance: ") + side +
                                " covariance is not symmetric");
}

// Eigendecomposition with tiny negatives clamped to zero; significantly
// negative eigenvalues mean the matrix is not a covariance at all.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd_eigen(const Eigen::MatrixXd &cov,
                                                         const char *side) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw DegenerateInputError("frechet_distance: eigendecomposition failed");
    const double lambda_max = std::max(0.0, solver.eigenvalues().maxCoeff());
    if (solver.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, lambda_max))
        throw InvalidInputError(std::string("frechet_distance: ") + side +
                                " covariance is not positive semi-definite");
    return solver;
}

} // namespace

LabeledData generate_synthetic(const SyntheticSpec &spec) {
    validate_spec(spec);
    const std::int64_t total = spec.total_count();
    RowMatrixF points(total, spec.dim);
    std::vector<std::int32_t> labels(static_cast<std::size_t>(total));

    Rng rng(spec.seed);
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
        sample_cluster(points, row, spec.clusters[c], rng);
        std::fill_n(labels.begin() + row, spec.clusters[c].count,
                    static_cast<std::int32_t>(c));
        row += spec.clusters[c].count;
    }
    if (spec.noise && spec.noise->count > 0) {
        for (std::int64_t i = 0; i < spec.noise->count; ++i) {
            for (int j = 0; j < spec.dim; ++j)
                points(row + i, j) = static_cast<float>(
                    rng.uniform(spec.noise->box_min[j], spec.noise->box_max[j]));
            labels[static_cast<std::size_t>(row + i)] = -1;
        }
    }
    return {FeatureSet(std::move(points)), std::move(labels)};
}

FeatureSet generate_reference(const SyntheticSpec &spec, std::uint64_t seed) {
    validate_spec(spec);
    const std::int64_t total = spec.cluster_count();
    if (total < 2)
        throw InvalidParameterError("reference generation needs cluster components");
    RowMatrixF points(total, spec.dim);
    Rng rng(seed);
    Eigen::Index row = 0;
    for (const ClusterSpec &cluster : spec.clusters) {
        sample_cluster(points, row, cluster, rng);
        row += cluster.count;
    }
    return FeatureSet(std::move(points));
}

GaussianMoments GmmModelState::moments() const {
    if (weights.empty()) throw InvalidInputError("mixture state has no components");
    const Eigen::Index d = means.front().size();
    GaussianMoments g;
    g.mean = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k < weights.size(); ++k) g.mean += weights[k] * means[k];
    g.covariance = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const Eigen::VectorXd delta = means[k] - g.mean;
        g.covariance += weights[k] * (covariances[k] + delta * delta.transpose());
    }
    return g;
}

GaussianTrainer::GaussianTrainer(double ridge_floor) : ridge_floor_(ridge_floor) {
    if (!(ridge_floor > 0.0))
        throw InvalidParameterError("ridge floor must be positive");
}

std::unique_ptr<ModelState> GaussianTrainer::train(const FeatureSet &features,
                                                   std::span<const std::int64_t> ids,
                                                   const ModelState *warm_start,
                                                   std::uint64_t seed) const {
    (void)warm_start; // exact MLE: a starting point cannot change the optimum
    (void)seed;       // closed form: nothing random to seed
    if (ids.empty()) throw InvalidParameterError("empty training set");
    return std::make_unique<GaussianModelState>(
        fit_gaussian(gather_rows(features, ids), ridge_floor_));
}

GmmTrainer::GmmTrainer(int components, double ridge_floor)
    : components_(components), ridge_floor_(ridge_floor) {
    if (components < 1) throw InvalidParameterError("GMM needs at least one component");
    if (!(ridge_floor > 0.0))
        throw InvalidParameterError("ridge floor must be positive");
}

std::unique_ptr<ModelState> GmmTrainer::train(const FeatureSet &features,
                                              std::span<const std::int64_t> ids,
                                              const ModelState *warm_start,
                                              std::uint64_t seed) const {
    if (ids.empty()) throw InvalidParameterError("empty training set");
    const Eigen::MatrixXd rows = gather_rows(features, ids);
    const Eigen::Index n = rows.rows();
    const Eigen::Index d = rows.cols();
    const auto K = static_cast<std::size_t>(components_);
    if (n < components_)
        throw DegenerateInputError("fewer training points than mixture components");

    auto state = std::make_unique<GmmModelState>();
    state->fitted_count = n;

    if (warm_start != nullptr) {
        const auto *prev = dynamic_cast<const GmmModelState *>(warm_start);
        if (prev == nullptr || prev->weights.size() != K ||
            (prev->means.empty() ? 0 : prev->means.front().size()) != d)
            throw InvalidInputError("warm start is not a matching mixture state");
        state->weights = prev->weights;
        state->means = prev->means;
        state->covariances = prev->covariances;
    } else {
        // k-means++ seeding: spread the initial means, share the global
        // covariance, equal weights; EM refines from there.
        Rng rng(seed);
        std::vector<Eigen::Index> centers;
        centers.push_back(
            static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
        Eigen::VectorXd nearest_sq =
            (rows.rowwise() - rows.row(centers[0])).rowwise().squaredNorm();
        while (centers.size() < K) {
            const double total = nearest_sq.sum();
            Eigen::Index pick;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double acc = 0.0;
                pick = n - 1;
                for (Eigen::Index i = 0; i < n; ++i) {
                    acc += nearest_sq[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<Eigen::Index>(
                    rng.uniform_index(static_cast<std::uint64_t>(n)));
            }
            centers.push_back(pick);
            nearest_sq = nearest_sq.cwiseMin(
                (rows.rowwise() - rows.row(pick)).rowwise().squaredNorm());
        }
        const GaussianModelState global = fit_gaussian(rows, ridge_floor_);
        state->weights.assign(K, 1.0 / static_cast<double>(K));
        for (Eigen::Index c : centers) {
            state->means.push_back(rows.row(c).transpose());
            state->covariances.push_back(global.covariance);
        }
    }

    constexpr int kMaxIterations = 100;
    constexpr double kLogLikelihoodTol = 1e-8;
    const double log_two_pi = std::log(2.0 * std::numbers::pi);

    Eigen::MatrixXd resp(n, static_cast<Eigen::Index>(K));
    double previous_ll = -std::numeric_limits<double>::infinity();
    state->converged = false;

    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        // E-step: responsibilities via log-sum-exp of component densities.
        std::vector<Eigen::MatrixXd> whiteners(K);
        std::vector<double> log_norms(K);
        for (std::size_t k = 0; k < K; ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(state->covariances[k]);
            if (solver.info() != Eigen::Success)
                throw DegenerateInputError("mixture covariance eigendecomposition failed");
            const Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(ridge_floor_);
            whiteners[k] = solver.eigenvectors() *
                           lambda.cwiseSqrt().cwiseInverse().asDiagonal();
            log_norms[k] = -0.5 * (static_cast<double>(d) * log_two_pi +
                                   lambda.array().log().sum());
        }
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double max_lp = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) {
                const Eigen::VectorXd centered = rows.row(i).transpose() - state->means[k];
                const double lp = std::log(state->weights[k]) + log_norms[k] -
                                  0.5 * (whiteners[k].transpose() * centered).squaredNorm();
                resp(i, static_cast<Eigen::Index>(k)) = lp;
                max_lp = std::max(max_lp, lp);
            }
            double sum = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                sum += std::exp(resp(i, static_cast<Eigen::Index>(k)) - max_lp);
            const double lse = max_lp + std::log(sum);
            for (std::size_t k = 0; k < K; ++k)
                resp(i, static_cast<Eigen::Index>(k)) =
                    std::exp(resp(i, static_cast<Eigen::Index>(k)) - lse);
            ll += lse;
        }
        ll /= static_cast<double>(n);

        // M-step.
        for (std::size_t k = 0; k < K; ++k) {
            const auto col = resp.col(static_cast<Eigen::Index>(k));
            const double nk = col.sum();
            state->weights[k] = nk / static_cast<double>(n);
            if (nk <= 0.0) continue; // dead component keeps its parameters
            const Eigen::VectorXd mu = (rows.transpose() * col) / nk;
            Eigen::MatrixXd centered = rows.rowwise() - mu.transpose();
            Eigen::MatrixXd cov =
                (centered.transpose() * col.asDiagonal() * centered) / nk;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
            if (solver.info() != Eigen::Success)
                throw DegenerateInputError("mixture covariance eigendecomposition failed");
            const Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(ridge_floor_);
            state->means[k] = mu;
            state->covariances[k] = solver.eigenvectors() * lambda.asDiagonal() *
                                    solver.eigenvectors().transpose();
        }

        state->iterations = iter;
        if (std::abs(ll - previous_ll) < kLogLikelihoodTol) {
            state->converged = true;
            break;
        }
        previous_ll = ll;
    }
    return state;
}

double frechet_distance(const GaussianMoments &a, const GaussianMoments &b) {
    require_moments(a, "first");
    require_moments(b, "second");
    if (a.mean.size() != b.mean.size())
        throw InvalidInputError("frechet_distance: dimension mismatch");

    const auto eig_a = psd_eigen(a.covariance, "first");
    const Eigen::MatrixXd sqrt_a = eig_a.eigenvectors() *
                                   eig_a.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                                   eig_a.eigenvectors().transpose();
    Eigen::MatrixXd inner = sqrt_a * b.covariance * sqrt_a;
    inner = 0.5 * (inner + inner.transpose()).eval();
    const auto eig_inner = psd_eigen(inner, "second");
    const double trace_sqrt = eig_inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double value = (a.mean - b.mean).squaredNorm() + a.covariance.trace() +
                         b.covariance.trace() - 2.0 * trace_sqrt;
    return std::max(0.0, value);
}

double frechet_distance(const GaussianModelState &a, const GaussianModelState &b) {
    return frechet_distance(a.moments(), b.moments());
}

double score_against_reference(const ModelState &model, const FeatureSet &reference) {
    const auto *with_moments = dynamic_cast<const MomentModelState *>(&model);
    if (with_moments == nullptr)
        throw InvalidInputError("model state does not expose Gaussian moments");
    const GaussianModelState ref = fit_gaussian(
        gather_rows(reference, reference.ids()), 1e-6);
    return frechet_distance(with_moments->moments(), ref.moments());
}

QualityMetric make_reference_metric(const FeatureSet &reference) {
    auto ref = std::make_shared<GaussianModelState>(
        fit_gaussian(gather_rows(reference, reference.ids()), 1e-6));
    return [ref](const ModelState &model) {
        const auto *with_moments = dynamic_cast<const MomentModelState *>(&model);
        if (with_moments == nullptr)
            throw InvalidInputError("model state does not expose Gaussian moments");
        return frechet_distance(with_moments->moments(), ref->moments());
    };
}

bool is_v_shaped(const ScoreCurve &curve) {
    if (curve.scores.size() < 3) return false;
    const std::size_t opt = curve.optimal_index;
    return opt > 0 && opt + 1 < curve.scores.size() &&
           curve.scores[opt] < curve.scores.front() &&
           curve.scores[opt] < curve.scores.back();
}

VshapeResult vshape_experiment(const SyntheticSpec &spec, std::int64_t base_size,
                               std::int64_t increment,
                               std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw InvalidParameterError("vshape_experiment needs at least one seed");
    validate_spec(spec);

    VshapeResult result;
    result.seeds.assign(seeds.begin(), seeds.end());
    std::int64_t v_shaped = 0;
    double optimal_sum = 0.0;

    for (std::uint64_t seed : seeds) {
        SyntheticSpec run_spec = spec;
        run_spec.seed = derive_seed(seed, kDataStream);
        const LabeledData data = generate_synthetic(run_spec);
        const FeatureSet reference =
            generate_reference(spec, derive_seed(seed, kReferenceStream));

        const KnnResult knn = pairwise_knn(data.features, default_k(data.features.size()));
        const WeightedDigraph graph =
            build_digraph(data.features, knn, calibrate_sigma(knn));
        const CentralityRanking ranking = stationary_centrality(graph);
        const CurriculumSchedule schedule = build_schedule(ranking, base_size, increment);

        const GaussianTrainer trainer;
        ScoreCurve curve = run_normal(data.features, schedule, trainer,
                                      make_reference_metric(reference),
                                      derive_seed(seed, kTrainStream));
        if (is_v_shaped(curve)) ++v_shaped;
        optimal_sum += static_cast<double>(curve.optimal_index);
        if (result.optimal_stage_histogram.empty())
            result.optimal_stage_histogram.assign(curve.scores.size(), 0);
        if (curve.optimal_index < result.optimal_stage_histogram.size())
            ++result.optimal_stage_histogram[curve.optimal_index];
        result.curves.push_back(std::move(curve));
    }

    result.fraction_v_shaped =
        static_cast<double>(v_shaped) / static_cast<double>(seeds.size());
    result.mean_optimal_stage = optimal_sum / static_cast<double>(seeds.size());
    return result;
}

} // namespace ccl
