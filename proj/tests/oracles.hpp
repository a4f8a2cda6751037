#pragma once

// Independent reference computations the unit and acceptance suites check
// the library against. These deliberately take different code paths than
// the implementations they vet.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "patchbench/geometry.hpp"
#include "patchbench/image.hpp"
#include "patchbench/rng.hpp"

namespace oracles {

/// AP via explicit step-function PR-curve integration: build the full
/// precision/recall arrays with prefix sums, then integrate P dR over the
/// recall steps.
inline double ap_step_pr(std::span<const std::int8_t> labels,
                         std::optional<int> positive_count = std::nullopt)
{
    std::vector<std::int8_t> kept;
    for (std::int8_t y : labels)
        if (y != 0)
            kept.push_back(y);

    int total_pos = 0;
    for (std::int8_t y : kept)
        if (y > 0)
            ++total_pos;
    const int denom = positive_count ? *positive_count : total_pos;

    std::vector<double> precision(kept.size());
    std::vector<double> recall(kept.size());
    int pos = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (kept[i] > 0)
            ++pos;
        precision[i] = static_cast<double>(pos) / static_cast<double>(i + 1);
        recall[i] = static_cast<double>(pos) / denom;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return ap;
}

/// Monte Carlo disc-disc IoU by point sampling over the joint bounding box.
inline double mc_disc_iou(const patchbench::RegionDetection& a,
                          const patchbench::RegionDetection& b, double rho,
                          patchbench::Rng& rng, int samples = 200000)
{
    const double r1 = rho * a.m;
    const double r2 = rho * b.m;
    const double x0 = std::min(a.cx - r1, b.cx - r2);
    const double x1 = std::max(a.cx + r1, b.cx + r2);
    const double y0 = std::min(a.cy - r1, b.cy - r2);
    const double y1 = std::max(a.cy + r1, b.cy + r2);

    int inter = 0, uni = 0;
    for (int i = 0; i < samples; ++i) {
        const double x = rng.uniform(x0, x1);
        const double y = rng.uniform(y0, y1);
        const bool in1 = (x - a.cx) * (x - a.cx) + (y - a.cy) * (y - a.cy) <= r1 * r1;
        const bool in2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy) <= r2 * r2;
        if (in1 && in2)
            ++inter;
        if (in1 || in2)
            ++uni;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

/// Scale change of a homography at a point via central finite differences of
/// the projected coordinates.
inline double fd_jacobian_scale(const patchbench::Homography& h, double x, double y,
                                double eps = 1e-5)
{
    auto map = [&](double px, double py, double& u, double& v) {
        const Eigen::Vector3d q = h * Eigen::Vector3d(px, py, 1.0);
        u = q.x() / q.z();
        v = q.y() / q.z();
    };
    double uxp, vxp, uxm, vxm, uyp, vyp, uym, vym;
    map(x + eps, y, uxp, vxp);
    map(x - eps, y, uxm, vxm);
    map(x, y + eps, uyp, vyp);
    map(x, y - eps, uym, vym);
    const double j00 = (uxp - uxm) / (2 * eps);
    const double j10 = (vxp - vxm) / (2 * eps);
    const double j01 = (uyp - uym) / (2 * eps);
    const double j11 = (vyp - vym) / (2 * eps);
    return std::sqrt(std::abs(j00 * j11 - j01 * j10));
}

/// Direct 6x6 area-average downsample: per output cell, accumulate every
/// pixel weighted by its 2-D overlap area with the cell.
inline Eigen::VectorXd brute_force_downsample6(const patchbench::Patch& p)
{
    constexpr int side = patchbench::kPatchSide;
    const double cell = side / 6.0;
    Eigen::VectorXd out(36);
    for (int cy = 0; cy < 6; ++cy)
        for (int cx = 0; cx < 6; ++cx) {
            double acc = 0.0;
            for (int y = 0; y < side; ++y)
                for (int x = 0; x < side; ++x) {
                    const double oy = std::min<double>(cell * (cy + 1), y + 1) -
                                      std::max<double>(cell * cy, y);
                    const double ox = std::min<double>(cell * (cx + 1), x + 1) -
                                      std::max<double>(cell * cx, x);
                    if (oy > 0 && ox > 0)
                        acc += oy * ox * p(y, x);
                }
            out(cy * 6 + cx) = acc / (cell * cell);
        }
    return out;
}

} // namespace oracles
