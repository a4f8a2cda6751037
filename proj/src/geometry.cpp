#include "patchbench/geometry.hpp"
#include <algorithm>

#include <cmath>
#include <stdexcept>

namespace patchbench {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
} // namespace

double wrap_angle(double theta)
{
    double t = std::fmod(theta + kPi, 2.0 * kPi);
    if (t < 0.0)
        t += 2.0 * kPi;
    return t - kPi;
}

Homography make_homography(const Eigen::Matrix3d& m)
{
    if (std::abs(m(2, 2)) < 1e-300)
        throw std::invalid_argument("make_homography: h22 vanishes");
    Homography h = m / m(2, 2);
    if (std::abs(h.determinant()) <= 1e-12)
        throw std::invalid_argument("make_homography: singular matrix");
    return h;
}

NoiseProfile noise_profile(NoiseLevel level)
{
    switch (level) {
    case NoiseLevel::Easy:
        return {10.0, 0.15, 0.15, 0.2, "Easy"};
    case NoiseLevel::Hard:
        return {20.0, 0.3, 0.3, 0.4, "Hard"};
    case NoiseLevel::Tough:
        return {30.0, 0.45, 0.5, 0.45, "Tough"};
    case NoiseLevel::None:
        return {0.0, 0.0, 0.0, 0.0, "None"};
    }
    throw std::invalid_argument("noise_profile: unknown level");
}

const char* noise_level_name(NoiseLevel level)
{
    switch (level) {
    case NoiseLevel::None:
        return "None";
    case NoiseLevel::Easy:
        return "Easy";
    case NoiseLevel::Hard:
        return "Hard";
    case NoiseLevel::Tough:
        return "Tough";
    }
    return "?";
}

NoiseTransform sample_noise(const NoiseProfile& profile, Rng& rng)
{
    if (!(std::isfinite(profile.theta_max_deg) && std::isfinite(profile.t_max) &&
          std::isfinite(profile.s_max) && std::isfinite(profile.a_max)))
        throw std::invalid_argument("sample_noise: non-finite profile bounds");
    if (profile.theta_max_deg < 0 || profile.t_max < 0 || profile.s_max < 0 ||
        profile.a_max < 0)
        throw std::invalid_argument("sample_noise: negative profile bounds");

    const double theta_max = profile.theta_max_deg * kDegToRad;
    NoiseTransform t;
    t.theta = rng.uniform(-theta_max, theta_max);
    t.tx = rng.uniform(-profile.t_max, profile.t_max);
    t.ty = rng.uniform(-profile.t_max, profile.t_max);
    t.s = std::exp2(rng.uniform(-profile.s_max, profile.s_max));
    t.a = std::exp2(rng.uniform(-profile.a_max, profile.a_max));
    return t;
}

Eigen::Matrix3d noise_to_matrix(const NoiseTransform& t, double m)
{
    if (!(t.s > 0.0) || !(t.a > 0.0) || !(m > 0.0))
        throw std::invalid_argument("noise_to_matrix: s, a and m must be positive");

    const double root_a = std::sqrt(t.a);
    const double sx = t.s / root_a;
    const double sy = t.s * root_a;
    const double c = std::cos(t.theta);
    const double s = std::sin(t.theta);

    Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
    // Linear part R(theta) * diag(sx, sy); translation in image units.
    a(0, 0) = c * sx;
    a(0, 1) = -s * sy;
    a(1, 0) = s * sx;
    a(1, 1) = c * sy;
    a(0, 2) = m * t.tx;
    a(1, 2) = m * t.ty;
    return a;
}

RegionDetection project_region(const RegionDetection& r, const Homography& h)
{
    const Eigen::Vector3d p = h * Eigen::Vector3d(r.cx, r.cy, 1.0);
    if (std::abs(p.z()) < 1e-12)
        throw std::domain_error("project_region: center maps to infinity");
    const double u = p.x() / p.z();
    const double v = p.y() / p.z();

    // Jacobian of the dehomogenized map at the center.
    Eigen::Matrix2d j;
    j << h(0, 0) - u * h(2, 0), h(0, 1) - u * h(2, 1),
         h(1, 0) - v * h(2, 0), h(1, 1) - v * h(2, 1);
    j /= p.z();

    const double det = j.determinant();
    if (std::abs(det) < 1e-15)
        throw std::domain_error("project_region: degenerate local map");

    const Eigen::Vector2d dir = j * Eigen::Vector2d(std::cos(r.theta), std::sin(r.theta));

    RegionDetection out;
    out.cx = u;
    out.cy = v;
    out.m = r.m * std::sqrt(std::abs(det));
    out.theta = wrap_angle(std::atan2(dir.y(), dir.x()));
    return out;
}

double region_iou(const RegionDetection& a, const RegionDetection& b, double rho)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("region_iou: rho must be positive");

    // Order the radii so the arithmetic is bit-identical under argument swap.
    const double r1 = rho * std::min(a.m, b.m);
    const double r2 = rho * std::max(a.m, b.m);
    const double d = std::hypot(std::abs(a.cx - b.cx), std::abs(a.cy - b.cy));

    if (d >= r1 + r2)
        return 0.0;
    if (d <= std::abs(r1 - r2)) {
        // One disc contains the other; coincident discs give exactly 1.
        const double rmin = std::min(r1, r2);
        const double rmax = std::max(r1, r2);
        const double ratio = rmin / rmax;
        return ratio * ratio;
    }

    // Lens area of two intersecting circles.
    const double inter =
        r1 * r1 * std::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)) +
        r2 * r2 * std::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)) -
        0.5 * std::sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2));
    const double uni = kPi * r1 * r1 + kPi * r2 * r2 - inter;
    return inter / uni;
}

Eigen::Matrix3d region_frame(const RegionDetection& r, double rho)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("region_frame: rho must be positive");
    const double e = rho * r.m;
    const double c = std::cos(r.theta);
    const double s = std::sin(r.theta);
    Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
    f(0, 0) = e * c;
    f(0, 1) = -e * s;
    f(1, 0) = e * s;
    f(1, 1) = e * c;
    f(0, 2) = r.cx;
    f(1, 2) = r.cy;
    return f;
}

} // namespace patchbench
