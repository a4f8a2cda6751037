#include "patchbench/postproc.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "patchbench/errors.hpp"

namespace patchbench {

ZcaModel identity_zca(int dim, double alpha)
{
    ZcaModel m;
    m.mean = Eigen::VectorXd::Zero(dim);
    m.whitener = Eigen::MatrixXd::Identity(dim, dim);
    m.clip_fraction = 1.0;
    m.alpha = alpha;
    return m;
}

ZcaModel fit_zca(const Eigen::MatrixXd& sample, double clip_fraction, double alpha)
{
    const auto n = sample.rows();
    const auto dim = sample.cols();
    if (!(clip_fraction > 0.0) || clip_fraction > 1.0)
        throw std::invalid_argument("fit_zca: clip_fraction must lie in (0, 1]");
    if (n < 10 * dim)
        throw std::invalid_argument("fit_zca: sample size must be >= 10 * D");

    ZcaModel model;
    model.clip_fraction = clip_fraction;
    model.alpha = alpha;
    model.mean = sample.colwise().mean();

    const Eigen::MatrixXd centered = sample.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw FitError("fit_zca: eigendecomposition failed");

    const Eigen::VectorXd eigenvalues = solver.eigenvalues();
    const double lambda_max = eigenvalues.maxCoeff();
    if (!(lambda_max > 0.0))
        throw FitError("fit_zca: covariance is rank-deficient beyond rescue");

    const double floor_value = clip_fraction * lambda_max;
    const Eigen::VectorXd clipped = eigenvalues.cwiseMax(floor_value);
    const Eigen::MatrixXd& u = solver.eigenvectors();
    model.whitener = u * clipped.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
    return model;
}

Eigen::VectorXd apply_post(const Eigen::VectorXd& descriptor, const ZcaModel& model)
{
    if (descriptor.size() != model.mean.size())
        throw std::invalid_argument("apply_post: dimension mismatch");

    Eigen::VectorXd v = model.whitener * (descriptor - model.mean);
    if (model.alpha != 1.0)
        v = v.array().sign() * v.array().abs().pow(model.alpha);
    const double norm = v.norm();
    if (norm > 0.0)
        v /= norm;
    return v;
}

Eigen::MatrixXd apply_post_rows(const Eigen::MatrixXd& descriptors, const ZcaModel& model)
{
    if (descriptors.cols() != model.mean.size())
        throw std::invalid_argument("apply_post_rows: dimension mismatch");

    Eigen::MatrixXd v =
        (descriptors.rowwise() - model.mean.transpose()) * model.whitener.transpose();
    if (model.alpha != 1.0)
        v = (v.array().sign() * v.array().abs().pow(model.alpha)).matrix();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double norm = v.row(i).norm();
        if (norm > 0.0)
            v.row(i) /= norm;
    }
    return v;
}

double select_clip_threshold(std::span<const double> candidates,
                             const std::function<double(double)>& eval_map)
{
    if (candidates.empty())
        throw std::invalid_argument("select_clip_threshold: no candidates");

    double best_clip = candidates[0];
    double best_map = eval_map(candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double map = eval_map(candidates[i]);
        // Ties resolve toward the larger clip (more regularization).
        if (map > best_map || (map == best_map && candidates[i] > best_clip)) {
            best_map = map;
            best_clip = candidates[i];
        }
    }
    return best_clip;
}

} // namespace patchbench
