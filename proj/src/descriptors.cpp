#include "patchbench/descriptors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace patchbench {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

const char* descriptor_family_name(DescriptorFamily f)
{
    switch (f) {
    case DescriptorFamily::MStd:
        return "mstd";
    case DescriptorFamily::Resz:
        return "resz";
    case DescriptorFamily::Sift:
        return "sift";
    case DescriptorFamily::RootSift:
        return "rsift";
    case DescriptorFamily::Brief:
        return "brief";
    }
    return "?";
}

int descriptor_dimension(DescriptorFamily f)
{
    switch (f) {
    case DescriptorFamily::MStd:
        return kMStdDim;
    case DescriptorFamily::Resz:
        return kReszDim;
    case DescriptorFamily::Sift:
    case DescriptorFamily::RootSift:
        return kSiftDim;
    case DescriptorFamily::Brief:
        return kBriefBits;
    }
    return 0;
}

bool descriptor_is_binary(DescriptorFamily f) { return f == DescriptorFamily::Brief; }

Eigen::Vector2d mstd(const Patch& p)
{
    double sum = 0.0;
    for (int y = 0; y < kPatchSide; ++y)
        for (int x = 0; x < kPatchSide; ++x)
            sum += p(y, x);
    const double mean = sum / (kPatchSide * kPatchSide);

    double var = 0.0;
    for (int y = 0; y < kPatchSide; ++y)
        for (int x = 0; x < kPatchSide; ++x) {
            const double d = p(y, x) - mean;
            var += d * d;
        }
    var /= kPatchSide * kPatchSide;
    return {mean, std::sqrt(var)};
}

Eigen::VectorXd resz(const Patch& p)
{
    constexpr int kCells = 6;
    const double cell = static_cast<double>(kPatchSide) / kCells;

    // Separable fractional pixel coverage of each output cell.
    Eigen::Matrix<double, kCells, kPatchSide> weights =
        Eigen::Matrix<double, kCells, kPatchSide>::Zero();
    for (int c = 0; c < kCells; ++c) {
        const double lo = c * cell;
        const double hi = (c + 1) * cell;
        for (int i = 0; i < kPatchSide; ++i) {
            const double overlap =
                std::min(hi, static_cast<double>(i + 1)) - std::max(lo, static_cast<double>(i));
            if (overlap > 0.0)
                weights(c, i) = overlap / cell;
        }
    }

    Eigen::VectorXd out(kReszDim);
    for (int cy = 0; cy < kCells; ++cy)
        for (int cx = 0; cx < kCells; ++cx) {
            double acc = 0.0;
            for (int y = 0; y < kPatchSide; ++y) {
                if (weights(cy, y) == 0.0)
                    continue;
                double row = 0.0;
                for (int x = 0; x < kPatchSide; ++x)
                    row += weights(cx, x) * p(y, x);
                acc += weights(cy, y) * row;
            }
            out(cy * kCells + cx) = acc;
        }

    const double mean = out.mean();
    const double sd = std::sqrt((out.array() - mean).square().mean());
    out.array() -= mean;
    out /= (sd < 1e-8 ? 1.0 : sd);
    return out;
}

namespace {

Eigen::VectorXd sift_raw_histogram(const Patch& p)
{
    constexpr int kGrid = 4;
    constexpr int kOri = 8;
    const double bin_size = static_cast<double>(kPatchSide) / kGrid;
    const double center = 0.5 * (kPatchSide - 1);
    const double sigma = 0.5 * kPatchSide;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

    Eigen::VectorXd hist = Eigen::VectorXd::Zero(kSiftDim);
    for (int y = 1; y < kPatchSide - 1; ++y)
        for (int x = 1; x < kPatchSide - 1; ++x) {
            const double gx = 0.5 * (p(y, x + 1) - p(y, x - 1));
            const double gy = 0.5 * (p(y + 1, x) - p(y - 1, x));
            const double mag = std::hypot(gx, gy);
            if (mag <= 0.0)
                continue;
            double angle = std::atan2(gy, gx);
            if (angle < 0.0)
                angle += 2.0 * kPi;

            const double d2 = (x - center) * (x - center) + (y - center) * (y - center);
            const double contrib = mag * std::exp(-d2 * inv_two_sigma2);

            // Continuous bin coordinates; cell centers at 0..3, orientation
            // bins wrap around.
            const double bx = (x - center) / bin_size + 0.5 * (kGrid - 1);
            const double by = (y - center) / bin_size + 0.5 * (kGrid - 1);
            const double bo = angle * kOri / (2.0 * kPi);

            const int x0 = static_cast<int>(std::floor(bx));
            const int y0 = static_cast<int>(std::floor(by));
            const int o0 = static_cast<int>(std::floor(bo));
            const double fx = bx - x0;
            const double fy = by - y0;
            const double fo = bo - o0;

            for (int dy = 0; dy < 2; ++dy) {
                const int ybin = y0 + dy;
                if (ybin < 0 || ybin >= kGrid)
                    continue;
                const double wy = dy ? fy : 1.0 - fy;
                for (int dx = 0; dx < 2; ++dx) {
                    const int xbin = x0 + dx;
                    if (xbin < 0 || xbin >= kGrid)
                        continue;
                    const double wx = dx ? fx : 1.0 - fx;
                    for (int dO = 0; dO < 2; ++dO) {
                        const int obin = (o0 + dO) % kOri;
                        const double wo = dO ? fo : 1.0 - fo;
                        hist((ybin * kGrid + xbin) * kOri + obin) += contrib * wy * wx * wo;
                    }
                }
            }
        }
    return hist;
}

} // namespace

namespace detail {

Eigen::VectorXd sift_clamped_unnormalized(const Patch& p)
{
    Eigen::VectorXd h = sift_raw_histogram(p);
    const double norm = h.norm();
    if (norm <= 0.0)
        return Eigen::VectorXd::Zero(kSiftDim);
    h /= norm;
    return h.cwiseMin(0.2);
}

} // namespace detail

Eigen::VectorXd sift(const Patch& p)
{
    Eigen::VectorXd h = detail::sift_clamped_unnormalized(p);
    const double norm = h.norm();
    if (norm <= 0.0)
        return h;
    return h / norm;
}

Eigen::VectorXd rootsift(const Patch& p)
{
    Eigen::VectorXd v = sift(p);
    const double l1 = v.lpNorm<1>();
    if (l1 <= 0.0)
        return v;
    return (v / l1).cwiseSqrt();
}

BriefPattern make_brief_pattern(std::uint64_t seed)
{
    BriefPattern pattern;
    Rng rng(seed);
    const double center = 0.5 * (kPatchSide - 1);
    const double sigma = static_cast<double>(kPatchSide) / 5.0;
    auto draw_point = [&](int& x, int& y) {
        x = std::clamp(static_cast<int>(std::lround(center + sigma * rng.normal())), 0,
                       kPatchSide - 1);
        y = std::clamp(static_cast<int>(std::lround(center + sigma * rng.normal())), 0,
                       kPatchSide - 1);
    };
    for (auto& pair : pattern.pairs) {
        draw_point(pair.x1, pair.y1);
        draw_point(pair.x2, pair.y2);
    }
    return pattern;
}

BriefDescriptor brief(const Patch& p, const BriefPattern& pattern)
{
    // Pre-smooth so single-pixel noise does not dominate the tests.
    Image img(kPatchSide, kPatchSide);
    img = p;
    const Image smoothed = gaussian_blur(img, 2.0);

    BriefDescriptor d;
    for (int k = 0; k < kBriefBits; ++k) {
        const auto& pr = pattern.pairs[k];
        if (smoothed(pr.y1, pr.x1) < smoothed(pr.y2, pr.x2))
            d.bits[k >> 6] |= (1ULL << (k & 63));
    }
    return d;
}

int hamming_distance(const BriefDescriptor& a, const BriefDescriptor& b)
{
    int dist = 0;
    for (int i = 0; i < 4; ++i)
        dist += std::popcount(a.bits[i] ^ b.bits[i]);
    return dist;
}

Descriptor compute_descriptor(DescriptorFamily f, const Patch& p, const BriefPattern* pattern)
{
    Descriptor d;
    d.family = f;
    switch (f) {
    case DescriptorFamily::MStd:
        d.values = mstd(p);
        break;
    case DescriptorFamily::Resz:
        d.values = resz(p);
        break;
    case DescriptorFamily::Sift:
        d.values = sift(p);
        break;
    case DescriptorFamily::RootSift:
        d.values = rootsift(p);
        break;
    case DescriptorFamily::Brief: {
        static const BriefPattern default_pattern = make_brief_pattern();
        d.binary = brief(p, pattern ? *pattern : default_pattern);
        break;
    }
    }
    return d;
}

double distance(const Descriptor& a, const Descriptor& b)
{
    if (a.family != b.family)
        throw std::invalid_argument("distance: descriptor family mismatch");
    if (descriptor_is_binary(a.family))
        return static_cast<double>(hamming_distance(a.binary, b.binary));
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("distance: dimension mismatch");
    return (a.values - b.values).norm();
}

} // namespace patchbench
