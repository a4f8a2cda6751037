#pragma once

#include <string>

#include <Eigen/Dense>

#include "patchbench/rng.hpp"

namespace patchbench {

/// 3x3 projective map in pixel coordinates, normalized so h(2,2) == 1.
using Homography = Eigen::Matrix3d;

/// Normalize the bottom-right entry to 1 and validate invertibility.
/// Throws std::invalid_argument when h22 vanishes or |det| <= 1e-12.
Homography make_homography(const Eigen::Matrix3d& m);

/// A detected keypoint: center in pixels, detection scale m in pixels
/// (>= 1.6 for detector output), orientation in [-pi, pi).
struct RegionDetection
{
    double cx = 0.0;
    double cy = 0.0;
    double m = 1.6;
    double theta = 0.0;
};

enum class NoiseLevel
{
    None,
    Easy,
    Hard,
    Tough,
};

/// Bounds of the geometric detection-noise distribution. Rotation in
/// degrees, translation as a fraction of the detection scale, isotropic
/// scale and anisotropy as log2 half-widths.
struct NoiseProfile
{
    double theta_max_deg = 0.0;
    double t_max = 0.0;
    double s_max = 0.0;
    double a_max = 0.0;
    std::string name = "None";
};

/// Preset noise profiles: Easy (10deg, 0.15, 0.15, 0.2),
/// Hard (20deg, 0.3, 0.3, 0.4), Tough (30deg, 0.45, 0.5, 0.45), None (zeros).
NoiseProfile noise_profile(NoiseLevel level);

const char* noise_level_name(NoiseLevel level);

/// One sampled detection perturbation: rotation theta (radians), translation
/// (tx, ty) in units of the detection scale, isotropic scale s and
/// anisotropy a as linear factors.
struct NoiseTransform
{
    double theta = 0.0;
    double tx = 0.0;
    double ty = 0.0;
    double s = 1.0;
    double a = 1.0;
};

/// Draw a perturbation uniformly from the profile intervals; s and a are
/// sampled uniformly in log2 and exponentiated. Zero bounds give the exact
/// identity transform.
NoiseTransform sample_noise(const NoiseProfile& profile, Rng& rng);

/// Affine matrix of a noise transform acting on region-centered
/// coordinates: scale by diag(s/sqrt(a), s*sqrt(a)), then rotate by theta,
/// then translate by (m*tx, m*ty). The linear part has determinant s^2.
Eigen::Matrix3d noise_to_matrix(const NoiseTransform& t, double m);

/// Map a region through a homography: center via projective transfer, scale
/// via sqrt(|det J|) of the local linearization, orientation transported
/// through J. Throws std::domain_error when the center maps to infinity.
RegionDetection project_region(const RegionDetection& r, const Homography& h);

/// Exact disc-disc intersection-over-union of two regions modeled as discs
/// of radius rho * m. Symmetric; returns 1 exactly iff the discs coincide.
double region_iou(const RegionDetection& a, const RegionDetection& b, double rho);

/// Affine frame mapping normalized patch coordinates [-1,1]^2 onto the
/// measurement region: center at the region, half-extent rho * m, rotated
/// by the region orientation.
Eigen::Matrix3d region_frame(const RegionDetection& r, double rho);

/// Wrap an angle into [-pi, pi).
double wrap_angle(double theta);

} // namespace patchbench
