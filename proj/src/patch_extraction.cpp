#include "patchbench/patch_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchbench/errors.hpp"

namespace patchbench {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kOrientationBins = 36;

/// Straight-line grid of normalized patch coordinates, -1 to 1 inclusive.
inline double grid_coord(int i) { return -1.0 + 2.0 * i / (kPatchSide - 1); }

} // namespace

std::vector<int> PatchCorpus::eval_split() const
{
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(sequences.size()); ++i)
        if (std::find(fit_split.begin(), fit_split.end(), i) == fit_split.end())
            out.push_back(i);
    return out;
}

double dominant_orientation(const Image& img, const RegionDetection& r)
{
    // Sample the measurement region axis-aligned (theta = 0); orientations
    // measured there are orientations in image coordinates.
    RegionDetection upright = r;
    upright.theta = 0.0;
    const Patch patch = warp_patch(img, region_frame(upright, 5.0));

    // Histogram bins centered on multiples of 10 degrees.
    double hist[kOrientationBins] = {};
    const double center = 0.5 * (kPatchSide - 1);
    const double sigma = 0.5 * kPatchSide;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    for (int y = 1; y < kPatchSide - 1; ++y)
        for (int x = 1; x < kPatchSide - 1; ++x) {
            const double gx = 0.5 * (patch(y, x + 1) - patch(y, x - 1));
            const double gy = 0.5 * (patch(y + 1, x) - patch(y - 1, x));
            const double mag = std::hypot(gx, gy);
            if (mag <= 0.0)
                continue;
            const double d2 = (x - center) * (x - center) + (y - center) * (y - center);
            const double weight = std::exp(-d2 * inv_two_sigma2);
            double angle = std::atan2(gy, gx);
            if (angle < 0.0)
                angle += 2.0 * kPi;
            const int bin = static_cast<int>(std::floor(angle * kOrientationBins / (2.0 * kPi) + 0.5)) %
                            kOrientationBins;
            hist[bin] += mag * weight;
        }

    double total = 0.0;
    for (double hv : hist)
        total += hv;
    if (total <= 0.0)
        return 0.0; // constant region: zero gradient everywhere

    // Two circular box-smoothing passes stabilize the peak on noisy data.
    for (int pass = 0; pass < 2; ++pass) {
        double smoothed[kOrientationBins];
        for (int i = 0; i < kOrientationBins; ++i) {
            const double prev = hist[(i + kOrientationBins - 1) % kOrientationBins];
            const double next = hist[(i + 1) % kOrientationBins];
            smoothed[i] = (prev + hist[i] + next) / 3.0;
        }
        std::copy(smoothed, smoothed + kOrientationBins, hist);
    }

    int peak = 0;
    for (int i = 1; i < kOrientationBins; ++i)
        if (hist[i] > hist[peak])
            peak = i;

    // Parabolic refinement around the peak bin.
    const double h0 = hist[(peak + kOrientationBins - 1) % kOrientationBins];
    const double h1 = hist[peak];
    const double h2 = hist[(peak + 1) % kOrientationBins];
    double offset = 0.0;
    const double denom = h0 - 2.0 * h1 + h2;
    if (std::abs(denom) > 1e-18)
        offset = -0.5 * (h2 - h0) / denom;

    const double angle = (peak + offset) * 2.0 * kPi / kOrientationBins;
    return wrap_angle(angle);
}

Patch warp_patch(const Image& img, const Eigen::Matrix3d& frame)
{
    Patch out;
    for (int i = 0; i < kPatchSide; ++i) {
        const double v = grid_coord(i);
        for (int j = 0; j < kPatchSide; ++j) {
            const double u = grid_coord(j);
            const Eigen::Vector3d p = frame * Eigen::Vector3d(u, v, 1.0);
            const double w = std::abs(p.z()) < 1e-12 ? 1e-12 : p.z();
            out(i, j) = sample_bilinear(img, p.x() / w, p.y() / w);
        }
    }
    return out;
}

Patch extract_patch(const Image& img, const RegionDetection& r, double rho)
{
    const Eigen::Matrix3d frame = region_frame(r, rho);
    // The frame is affine; its corner images bound the sampled quad.
    for (int sy = -1; sy <= 1; sy += 2)
        for (int sx = -1; sx <= 1; sx += 2) {
            const Eigen::Vector3d c = frame * Eigen::Vector3d(sx, sy, 1.0);
            if (c.x() < 0.0 || c.x() > image_width(img) - 1 || c.y() < 0.0 ||
                c.y() > image_height(img) - 1)
                throw std::out_of_range("extract_patch: frame exceeds the image");
        }
    return warp_patch(img, frame);
}

namespace {

/// Worst-case support radius (in reference pixels) of the noisy measurement
/// region under a noise profile: corners reach rho*m*s*sqrt(a)*sqrt(2) from
/// a center displaced by up to m*t_max*sqrt(2).
double noisy_support_radius(const RegionDetection& r, double rho, const NoiseProfile& p)
{
    const double max_stretch = std::exp2(p.s_max) * std::exp2(0.5 * p.a_max);
    return r.m * (p.t_max * std::sqrt(2.0) + rho * max_stretch * std::sqrt(2.0));
}

bool disc_inside_image(double cx, double cy, double radius, int w, int h)
{
    return cx - radius >= 0.0 && cy - radius >= 0.0 && cx + radius <= w - 1.0 &&
           cy + radius <= h - 1.0;
}

/// Project the boundary of a disc through a homography and test that the
/// resulting bounding box (plus margin) stays inside the image.
bool projected_disc_inside(const Homography& h, double cx, double cy, double radius,
                           int w, int ht)
{
    constexpr int kBoundarySamples = 16;
    constexpr double kMargin = 2.0;
    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    for (int i = 0; i <= kBoundarySamples; ++i) {
        double px = cx, py = cy;
        if (i < kBoundarySamples) {
            const double phi = 2.0 * kPi * i / kBoundarySamples;
            px += radius * std::cos(phi);
            py += radius * std::sin(phi);
        }
        const Eigen::Vector3d q = h * Eigen::Vector3d(px, py, 1.0);
        if (q.z() < 1e-9)
            return false;
        min_x = std::min(min_x, q.x() / q.z());
        max_x = std::max(max_x, q.x() / q.z());
        min_y = std::min(min_y, q.y() / q.z());
        max_y = std::max(max_y, q.y() / q.z());
    }
    return min_x >= kMargin && min_y >= kMargin && max_x <= w - 1.0 - kMargin &&
           max_y <= ht - 1.0 - kMargin;
}

} // namespace

bool region_fully_contained(const Sequence& seq, const RegionDetection& r, double rho)
{
    const int w = image_width(seq.ref);
    const int h = image_height(seq.ref);

    // Reference image: extraction support plus the rho=5 orientation support.
    const double ref_radius = std::max(rho, 5.0) * r.m * std::sqrt(2.0);
    if (!disc_inside_image(r.cx, r.cy, ref_radius, w, h))
        return false;

    // Targets: Tough-inflated noisy support, projected by each homography.
    const double noisy_radius = noisy_support_radius(r, rho, noise_profile(NoiseLevel::Tough));
    for (const Homography& hom : seq.homographies)
        if (!projected_disc_inside(hom, r.cx, r.cy, noisy_radius, w, h))
            return false;
    return true;
}

std::array<NoiseProfile, 3> default_noise_profiles()
{
    return {noise_profile(NoiseLevel::Easy), noise_profile(NoiseLevel::Hard),
            noise_profile(NoiseLevel::Tough)};
}

BuildOptions::BuildOptions() : profiles(default_noise_profiles()) {}

SequencePatches build_sequence_patches(const Sequence& seq,
                                       const std::vector<RegionDetection>& regions,
                                       double rho, std::uint64_t noise_seed,
                                       const BuildOptions& options)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("build_sequence_patches: rho must be positive");
    const double containment_rho =
        options.containment_rho > 0.0 ? std::max(options.containment_rho, rho) : rho;

    SequencePatches out;
    out.id = seq.id;
    out.kind = seq.kind;
    out.homographies = seq.homographies;

    for (int i = 0; i < static_cast<int>(regions.size()); ++i) {
        if (!region_fully_contained(seq, regions[i], containment_rho))
            continue;
        out.region_ids.push_back(i);
        out.regions.push_back(regions[i]);
    }
    if (out.region_ids.empty())
        throw GenerationError("build_sequence_patches: no region survives containment");

    const int n = out.group_count();
    out.ref.reserve(n);
    for (int v = 0; v < 3; ++v) {
        out.targets[v].resize(static_cast<std::size_t>(n) * 5);
        out.noise[v].resize(static_cast<std::size_t>(n) * 5);
    }

    for (int g = 0; g < n; ++g) {
        const RegionDetection& region = out.regions[g];
        const int region_id = out.region_ids[g];
        out.ref.push_back(quantize_unit(extract_patch(seq.ref, region, rho)));

        Eigen::Matrix3d to_center = Eigen::Matrix3d::Identity();
        to_center(0, 2) = -region.cx;
        to_center(1, 2) = -region.cy;
        Eigen::Matrix3d from_center = Eigen::Matrix3d::Identity();
        from_center(0, 2) = region.cx;
        from_center(1, 2) = region.cy;
        const Eigen::Matrix3d frame = region_frame(region, rho);

        for (int v = 0; v < 3; ++v) {
            const NoiseProfile& profile = options.profiles[v];
            for (int k = 0; k < 5; ++k) {
                Rng rng(derive_seed(noise_seed, static_cast<std::uint64_t>(region_id),
                                    static_cast<std::uint64_t>(k),
                                    static_cast<std::uint64_t>(v)));
                const NoiseTransform t = sample_noise(profile, rng);
                // Noise perturbs the detection in the reference frame, then
                // the ground-truth homography carries it into the target.
                const Eigen::Matrix3d noisy =
                    from_center * noise_to_matrix(t, region.m) * to_center;
                const Eigen::Matrix3d full = seq.homographies[k] * noisy * frame;
                out.targets[v][g * 5 + k] = quantize_unit(warp_patch(seq.targets[k], full));
                out.noise[v][g * 5 + k] = t;
            }
        }
    }
    return out;
}

} // namespace patchbench
