#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

namespace patchbench {

/// ZCA whitening model with clipped eigenvalues, followed at apply time by
/// signed power-law and L2 normalization.
struct ZcaModel
{
    Eigen::VectorXd mean;
    Eigen::MatrixXd whitener; // symmetric
    double clip_fraction = 1.0;
    double alpha = 0.5;
};

/// A do-nothing whitener (zero mean, identity map) for the given dimension.
ZcaModel identity_zca(int dim, double alpha = 1.0);

/// Fit ZCA on a sample matrix (one descriptor per row). Eigenvalues of the
/// sample covariance below clip_fraction * lambda_max are floored there;
/// the whitener is U diag(1/sqrt(lambda)) U^T, rotating back to the input
/// basis. Unsupervised; no labels enter. Requires n >= 10 * D.
/// Throws FitError when lambda_max <= 0.
ZcaModel fit_zca(const Eigen::MatrixXd& sample, double clip_fraction,
                 double alpha = 0.5);

/// whiten, signed power law |v|^alpha, L2 normalize. Zero vectors pass
/// through as zero. Throws std::invalid_argument on dimension mismatch.
Eigen::VectorXd apply_post(const Eigen::VectorXd& descriptor, const ZcaModel& model);

/// Row-wise apply_post over a descriptor matrix.
Eigen::MatrixXd apply_post_rows(const Eigen::MatrixXd& descriptors, const ZcaModel& model);

/// Pick the candidate clip fraction maximizing the evaluation functional
/// (mAP on a held-out split); exact ties resolve toward the larger clip.
double select_clip_threshold(std::span<const double> candidates,
                             const std::function<double(double)>& eval_map);

} // namespace patchbench
