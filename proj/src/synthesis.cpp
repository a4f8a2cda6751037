#include "patchbench/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "patchbench/errors.hpp"

namespace patchbench {

namespace {

constexpr double kPi = 3.14159265358979323846;

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double random_direction(Rng& rng)
{
    // Magnitude in [0.5, 1] with random sign, so severity scaling always
    // produces a visible, monotonically growing effect.
    const double mag = rng.uniform(0.5, 1.0);
    return rng.uniform() < 0.5 ? -mag : mag;
}

} // namespace

const char* sequence_kind_name(SequenceKind kind)
{
    return kind == SequenceKind::Viewpoint ? "viewpoint" : "illumination";
}

Image gen_texture(std::uint64_t seed, int width, int height)
{
    if (width < 64 || height < 64)
        throw std::invalid_argument("gen_texture: dimensions must be >= 64");

    Eigen::ArrayXXd acc = Eigen::ArrayXXd::Zero(height, width);

    // Multi-octave value noise on progressively finer lattices. Octave
    // weights are jittered per seed so scenes differ in character, not just
    // in sample values. The octaves stop at 8px: smoother texture keeps
    // small measurement regions from carrying a unique high-frequency
    // fingerprint, which would make the matching tasks trivially easy.
    const int steps[] = {64, 32, 16, 8};
    double amps[] = {1.0, 0.62, 0.40, 0.25};
    {
        Rng amp_rng(derive_seed(seed, 4));
        for (double& a : amps)
            a *= amp_rng.uniform(0.55, 1.45);
    }
    for (int oct = 0; oct < 4; ++oct) {
        const int step = steps[oct];
        const int gw = width / step + 2;
        const int gh = height / step + 2;
        Rng rng(derive_seed(seed, 1, static_cast<std::uint64_t>(oct)));
        Eigen::ArrayXXd lattice(gh, gw);
        for (int gy = 0; gy < gh; ++gy)
            for (int gx = 0; gx < gw; ++gx)
                lattice(gy, gx) = rng.uniform(-1.0, 1.0);

        for (int y = 0; y < height; ++y) {
            const double fy = static_cast<double>(y) / step;
            const int iy = static_cast<int>(fy);
            const double wy = smoothstep(fy - iy);
            for (int x = 0; x < width; ++x) {
                const double fx = static_cast<double>(x) / step;
                const int ix = static_cast<int>(fx);
                const double wx = smoothstep(fx - ix);
                const double top = lattice(iy, ix) + wx * (lattice(iy, ix + 1) - lattice(iy, ix));
                const double bot = lattice(iy + 1, ix) + wx * (lattice(iy + 1, ix + 1) - lattice(iy + 1, ix));
                acc(y, x) += amps[oct] * (top + wy * (bot - top));
            }
        }
    }

    // Feature counts scale with area so texture statistics do not thin out
    // on larger scenes.
    const double area_scale = static_cast<double>(width) * height / (256.0 * 256.0);

    // Soft blobs give the detector well-localized extrema.
    {
        Rng rng(derive_seed(seed, 2));
        const int n_blobs =
            static_cast<int>(std::lround((10 + rng.uniform_int(6)) * area_scale));
        for (int b = 0; b < n_blobs; ++b) {
            const double cx = rng.uniform(0.0, width - 1.0);
            const double cy = rng.uniform(0.0, height - 1.0);
            const double radius = rng.uniform(4.0, std::min(width, height) / 8.0);
            const double amp = random_direction(rng) * rng.uniform(0.4, 0.9);
            const int x0 = std::max(0, static_cast<int>(cx - radius));
            const int x1 = std::min(width - 1, static_cast<int>(cx + radius) + 1);
            const int y0 = std::max(0, static_cast<int>(cy - radius));
            const int y1 = std::min(height - 1, static_cast<int>(cy + radius) + 1);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
                    if (d2 < 1.0) {
                        const double falloff = (1.0 - d2) * (1.0 - d2);
                        acc(y, x) += amp * falloff;
                    }
                }
        }
    }

    // Stamp a couple of motifs at several places each: real scenes contain
    // repeated structures, which is what makes same-sequence negatives hard
    // for the verification task.
    {
        Rng rng(derive_seed(seed, 5));
        for (int mi = 0; mi < 2; ++mi) {
            const int motif_size = 64 + rng.uniform_int(33);
            Eigen::ArrayXXd motif(motif_size, motif_size);
            const int grid = 6;
            const int gw = motif_size / grid + 2;
            Eigen::ArrayXXd lattice(gw, gw);
            for (int gy = 0; gy < gw; ++gy)
                for (int gx = 0; gx < gw; ++gx)
                    lattice(gy, gx) = rng.uniform(-1.0, 1.0);
            for (int y = 0; y < motif_size; ++y)
                for (int x = 0; x < motif_size; ++x) {
                    const double fy = static_cast<double>(y) / grid;
                    const double fx = static_cast<double>(x) / grid;
                    const int iy = static_cast<int>(fy);
                    const int ix = static_cast<int>(fx);
                    const double wy = smoothstep(fy - iy);
                    const double wx = smoothstep(fx - ix);
                    const double top =
                        lattice(iy, ix) + wx * (lattice(iy, ix + 1) - lattice(iy, ix));
                    const double bot = lattice(iy + 1, ix) +
                                       wx * (lattice(iy + 1, ix + 1) - lattice(iy + 1, ix));
                    // Separable quadratic window, zero at the motif border.
                    const double u = 2.0 * x / (motif_size - 1) - 1.0;
                    const double v = 2.0 * y / (motif_size - 1) - 1.0;
                    motif(y, x) = (top + wy * (bot - top)) * (1.0 - u * u) * (1.0 - v * v);
                }

            const int n_stamps =
                static_cast<int>(std::lround((3 + rng.uniform_int(3)) * area_scale));
            for (int st = 0; st < n_stamps; ++st) {
                const int x0 = rng.uniform_int(width - motif_size);
                const int y0 = rng.uniform_int(height - motif_size);
                const double amp = random_direction(rng) * rng.uniform(1.0, 1.7);
                for (int y = 0; y < motif_size; ++y)
                    for (int x = 0; x < motif_size; ++x)
                        acc(y0 + y, x0 + x) += amp * motif(y, x);
            }
        }
    }

    // Soft step edges keep gradient orientations spread across the circle.
    {
        Rng rng(derive_seed(seed, 3));
        const int n_edges =
            static_cast<int>(std::lround((5 + rng.uniform_int(4)) * std::sqrt(area_scale)));
        for (int e = 0; e < n_edges; ++e) {
            const double px = rng.uniform(0.2 * width, 0.8 * width);
            const double py = rng.uniform(0.2 * height, 0.8 * height);
            const double phi = rng.uniform(0.0, 2.0 * kPi);
            const double nx = std::cos(phi);
            const double ny = std::sin(phi);
            const double amp = random_direction(rng) * rng.uniform(0.3, 0.6);
            const double soft = rng.uniform(0.8, 2.5);
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x) {
                    const double sd = (x - px) * nx + (y - py) * ny;
                    acc(y, x) += amp * std::tanh(sd / soft);
                }
        }
    }

    const double mean = acc.mean();
    const double sd = std::sqrt((acc - mean).square().mean());
    Image out(height, width);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double v = 0.5 + 0.17 * (acc(y, x) - mean) / (sd > 1e-12 ? sd : 1.0);
            out(y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    return quantize_unit(out);
}

Image warp_image(const Image& img, const Homography& h)
{
    const Eigen::Matrix3d hinv = h.inverse();
    const int w = image_width(img);
    const int ht = image_height(img);
    Image out(ht, w);
    for (int y = 0; y < ht; ++y)
        for (int x = 0; x < w; ++x) {
            const Eigen::Vector3d q = hinv * Eigen::Vector3d(x, y, 1.0);
            const double wz = std::abs(q.z()) < 1e-12 ? 1e-12 : q.z();
            out(y, x) = sample_bilinear(img, q.x() / wz, q.y() / wz);
        }
    return out;
}

Image apply_photometric(const Image& img, const PhotometricParams& params)
{
    const int w = image_width(img);
    const int h = image_height(img);
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);
    const double rmax2 = cx * cx + cy * cy;
    Image out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = std::clamp(params.gain * img(y, x) + params.bias, 0.0, 1.0);
            if (params.gamma != 1.0)
                v = std::pow(v, params.gamma);
            if (params.vignette != 0.0) {
                const double r2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / rmax2;
                v *= 1.0 - params.vignette * r2;
            }
            out(y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    return out;
}

namespace {

void validate_spec(const SequenceSpec& spec, SequenceKind expected)
{
    if (spec.kind != expected)
        throw std::invalid_argument("sequence spec has the wrong kind");
    if (spec.width < 64 || spec.height < 64)
        throw std::invalid_argument("sequence spec dimensions must be >= 64");
    for (int k = 0; k < 5; ++k) {
        if (spec.severity[k] < 0.0 || spec.severity[k] > 1.0)
            throw std::invalid_argument("severity must lie in [0, 1]");
        if (k > 0 && spec.severity[k] < spec.severity[k - 1])
            throw std::invalid_argument("severity schedule must be non-decreasing");
    }
}

/// det of the 2x2 Jacobian of the dehomogenized map of h at (x, y), plus the
/// homogeneous denominator. Used to reject folding homographies.
bool locally_orientation_preserving(const Homography& h, double x, double y)
{
    const Eigen::Vector3d p = h * Eigen::Vector3d(x, y, 1.0);
    if (p.z() < 1e-6)
        return false;
    const double u = p.x() / p.z();
    const double v = p.y() / p.z();
    Eigen::Matrix2d j;
    j << h(0, 0) - u * h(2, 0), h(0, 1) - u * h(2, 1),
         h(1, 0) - v * h(2, 0), h(1, 1) - v * h(2, 1);
    return j.determinant() / (p.z() * p.z()) > 1e-9;
}

bool homography_valid_on_frame(const Homography& h, int width, int height)
{
    const Homography hinv = make_homography(h.inverse());
    for (int gy = 0; gy <= 4; ++gy)
        for (int gx = 0; gx <= 4; ++gx) {
            const double x = gx * (width - 1) / 4.0;
            const double y = gy * (height - 1) / 4.0;
            if (!locally_orientation_preserving(h, x, y))
                return false;
            if (!locally_orientation_preserving(hinv, x, y))
                return false;
        }
    return true;
}

} // namespace

Sequence gen_viewpoint_sequence(const SequenceSpec& spec)
{
    validate_spec(spec, SequenceKind::Viewpoint);

    Sequence seq;
    seq.id = spec.id;
    seq.kind = SequenceKind::Viewpoint;
    seq.ref = gen_texture(derive_seed(spec.seed, 0), spec.width, spec.height);

    const double cx = 0.5 * (spec.width - 1);
    const double cy = 0.5 * (spec.height - 1);

    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
        // One direction bundle per attempt; per-target magnitudes scale with
        // severity so the sequence deforms progressively in a fixed manner.
        Rng rng(derive_seed(spec.seed, 1, static_cast<std::uint64_t>(attempt)));
        const double rot_d = random_direction(rng);
        const double zoom_d = random_direction(rng);
        const double px_d = random_direction(rng);
        const double py_d = random_direction(rng);
        const double tx_d = random_direction(rng);
        const double ty_d = random_direction(rng);

        std::array<Homography, 5> hs;
        bool all_ok = true;
        for (int k = 0; k < 5; ++k) {
            const double sev = spec.severity[k];
            const double angle = rot_d * sev * 0.40;
            const double zoom = std::exp2(zoom_d * sev * 0.45);
            // Perspective stays mild: the scenes are planar, and strong
            // perspective would distort large measurement regions enough to
            // cancel the benefit of added context.
            const double px = px_d * sev * 0.22 / (spec.width + spec.height);
            const double py = py_d * sev * 0.22 / (spec.width + spec.height);
            const double tx = tx_d * sev * 0.06 * std::min(spec.width, spec.height);
            const double ty = ty_d * sev * 0.06 * std::min(spec.width, spec.height);

            Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            m(0, 0) = zoom * c;
            m(0, 1) = -zoom * s;
            m(1, 0) = zoom * s;
            m(1, 1) = zoom * c;
            m(2, 0) = px;
            m(2, 1) = py;

            Eigen::Matrix3d to_center = Eigen::Matrix3d::Identity();
            to_center(0, 2) = -cx;
            to_center(1, 2) = -cy;
            Eigen::Matrix3d back = Eigen::Matrix3d::Identity();
            back(0, 2) = cx + tx;
            back(1, 2) = cy + ty;

            const Homography h = make_homography(back * m * to_center);
            if (!homography_valid_on_frame(h, spec.width, spec.height)) {
                all_ok = false;
                break;
            }
            hs[k] = h;
        }
        if (all_ok) {
            seq.homographies = hs;
            accepted = true;
        }
    }
    if (!accepted)
        throw GenerationError("gen_viewpoint_sequence: no valid homography in 100 tries");

    for (int k = 0; k < 5; ++k)
        seq.targets[k] = quantize_unit(warp_image(seq.ref, seq.homographies[k]));
    return seq;
}

PhotometricParams illum_params(const SequenceSpec& spec, int target_index)
{
    if (target_index < 0 || target_index >= 5)
        throw std::invalid_argument("illum_params: target index out of range");
    Rng rng(derive_seed(spec.seed, 1));
    const double gain_d = random_direction(rng);
    const double bias_d = random_direction(rng);
    const double gamma_d = random_direction(rng);
    const double vig_u = rng.uniform(0.5, 1.0);

    const double sev = spec.severity[target_index];
    PhotometricParams p;
    p.gain = std::exp2(gain_d * 0.6 * sev);
    p.bias = bias_d * 0.22 * sev;
    p.gamma = sev == 0.0 ? 1.0 : std::exp2(gamma_d * 0.7 * sev);
    p.vignette = vig_u * 0.5 * sev;
    return p;
}

Sequence gen_illum_sequence(const SequenceSpec& spec)
{
    validate_spec(spec, SequenceKind::Illumination);

    Sequence seq;
    seq.id = spec.id;
    seq.kind = SequenceKind::Illumination;
    seq.ref = gen_texture(derive_seed(spec.seed, 0), spec.width, spec.height);
    for (int k = 0; k < 5; ++k) {
        seq.homographies[k] = Homography::Identity();
        seq.targets[k] = quantize_unit(apply_photometric(seq.ref, illum_params(spec, k)));
    }
    return seq;
}

std::vector<RegionDetection> detect_regions(const Image& img, Rng& rng, int max_regions)
{
    if (max_regions < 1)
        throw std::invalid_argument("detect_regions: max_regions must be >= 1");
    const int w = image_width(img);
    const int h = image_height(img);
    if (w < 64 || h < 64)
        throw std::invalid_argument("detect_regions: image too small");

    // Scale-normalized Laplacian responses at half-octave scales from 1.6px.
    const double scales[] = {1.6, 1.6 * 1.4142135623730951, 3.2, 3.2 * 1.4142135623730951};

    struct Candidate
    {
        RegionDetection region;
        double response;
    };
    std::vector<Candidate> candidates;

    double global_max = 0.0;
    std::vector<Eigen::ArrayXXd> responses;
    for (double sigma : scales) {
        const Image blurred = gaussian_blur(img, sigma);
        Eigen::ArrayXXd resp = Eigen::ArrayXXd::Zero(h, w);
        for (int y = 1; y < h - 1; ++y)
            for (int x = 1; x < w - 1; ++x) {
                const double lap = blurred(y, x - 1) + blurred(y, x + 1) +
                                   blurred(y - 1, x) + blurred(y + 1, x) -
                                   4.0 * blurred(y, x);
                resp(y, x) = sigma * sigma * lap;
            }
        global_max = std::max(global_max, resp.abs().maxCoeff());
        responses.push_back(std::move(resp));
    }

    const double threshold = 0.05 * global_max;
    for (std::size_t si = 0; si < responses.size(); ++si) {
        const double sigma = scales[si];
        const Eigen::ArrayXXd& resp = responses[si];
        const int margin = static_cast<int>(std::ceil(3.0 * sigma)) + 1;
        for (int y = margin; y < h - margin; ++y)
            for (int x = margin; x < w - margin; ++x) {
                const double v = std::abs(resp(y, x));
                if (v <= threshold)
                    continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0)
                            continue;
                        if (std::abs(resp(y + dy, x + dx)) >= v) {
                            is_max = false;
                            break;
                        }
                    }
                if (is_max)
                    candidates.push_back(
                        {{static_cast<double>(x), static_cast<double>(y), sigma, 0.0}, v});
            }
    }

    // Cluster near-duplicates (IoU >= 0.5 at detection scale) transitively,
    // then retain one random member per cluster.
    const int n = static_cast<int>(candidates.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto& a = candidates[i].region;
            const auto& b = candidates[j].region;
            const double rsum = a.m + b.m;
            const double dx = a.cx - b.cx;
            const double dy = a.cy - b.cy;
            if (dx * dx + dy * dy >= rsum * rsum)
                continue;
            if (region_iou(a, b, 1.0) >= 0.5) {
                const int ra = find(i), rb = find(j);
                if (ra != rb)
                    parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }

    std::vector<std::vector<int>> clusters;
    std::vector<int> cluster_of(n, -1);
    for (int i = 0; i < n; ++i) {
        const int root = find(i);
        if (cluster_of[root] < 0) {
            cluster_of[root] = static_cast<int>(clusters.size());
            clusters.emplace_back();
        }
        clusters[cluster_of[root]].push_back(i);
    }

    std::vector<int> survivors;
    survivors.reserve(clusters.size());
    for (const auto& members : clusters)
        survivors.push_back(members[rng.uniform_int(static_cast<int>(members.size()))]);

    if (static_cast<int>(survivors.size()) < 8)
        throw GenerationError("detect_regions: fewer than 8 regions survive");

    if (static_cast<int>(survivors.size()) > max_regions) {
        // Uniform subsample: partial Fisher-Yates, then restore scan order.
        for (int i = 0; i < max_regions; ++i) {
            const int j = i + rng.uniform_int(static_cast<int>(survivors.size()) - i);
            std::swap(survivors[i], survivors[j]);
        }
        survivors.resize(max_regions);
        std::sort(survivors.begin(), survivors.end());
    }

    std::vector<RegionDetection> out;
    out.reserve(survivors.size());
    for (int idx : survivors)
        out.push_back(candidates[idx].region);
    return out;
}

} // namespace patchbench
