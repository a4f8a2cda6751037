#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "patchbench/image.hpp"
#include "patchbench/rng.hpp"

namespace patchbench {

inline constexpr int kMStdDim = 2;
inline constexpr int kReszDim = 36;
inline constexpr int kSiftDim = 128;
inline constexpr int kBriefBits = 256;

/// Default seed of the BRIEF sampling pattern; part of the configuration so
/// the pattern is identical across runs and machines.
inline constexpr std::uint64_t kBriefPatternSeed = 0x42AD5EEDULL;

enum class DescriptorFamily
{
    MStd,
    Resz,
    Sift,
    RootSift,
    Brief,
};

const char* descriptor_family_name(DescriptorFamily f);
int descriptor_dimension(DescriptorFamily f); // bits for Brief
bool descriptor_is_binary(DescriptorFamily f);

/// [mean, population standard deviation] of the patch.
Eigen::Vector2d mstd(const Patch& p);

/// 6x6 area-average downsample, standardized to zero mean / unit variance
/// over its 36 entries. Near-constant patches fall back to dividing by 1,
/// yielding the zero vector.
Eigen::VectorXd resz(const Patch& p);

/// SIFT over the full 65x65 patch: 4x4 spatial cells x 8 orientation bins
/// of Gaussian-windowed gradient magnitude with trilinear soft-binning;
/// L2-normalize, clamp at 0.2, re-L2-normalize. Zero-gradient input gives
/// the zero vector.
Eigen::VectorXd sift(const Patch& p);

/// RootSIFT: sift, L1-normalize, element-wise square root. Unit L2 norm for
/// any nonzero input.
Eigen::VectorXd rootsift(const Patch& p);

namespace detail {
/// Clamped-but-unnormalized SIFT stage, exposed so tests can check the 0.2
/// component clamp before the final renormalization.
Eigen::VectorXd sift_clamped_unnormalized(const Patch& p);
} // namespace detail

/// 256-bit binary descriptor compared under Hamming distance.
struct BriefDescriptor
{
    std::array<std::uint64_t, 4> bits = {};
};

/// Fixed pseudo-random point-pair pattern: 256 pairs with isotropic Gaussian
/// coordinates (sigma = patch_side / 5) clamped inside the patch.
struct BriefPattern
{
    struct PointPair
    {
        int x1, y1, x2, y2;
    };
    std::array<PointPair, kBriefBits> pairs;
};

BriefPattern make_brief_pattern(std::uint64_t seed = kBriefPatternSeed);

/// BRIEF test over the pattern after Gaussian pre-smoothing (sigma = 2px):
/// bit k is set when I(p_k) < I(q_k).
BriefDescriptor brief(const Patch& p, const BriefPattern& pattern);

int hamming_distance(const BriefDescriptor& a, const BriefDescriptor& b);

/// A descriptor tagged with its family, carrying either real values (L2
/// metric) or packed bits (Hamming metric).
struct Descriptor
{
    DescriptorFamily family = DescriptorFamily::Sift;
    Eigen::VectorXd values;
    BriefDescriptor binary;
};

Descriptor compute_descriptor(DescriptorFamily f, const Patch& p,
                              const BriefPattern* pattern = nullptr);

/// L2 for real families, Hamming for binary ones. Throws
/// std::invalid_argument on family or dimension mismatch.
double distance(const Descriptor& a, const Descriptor& b);

/// Confidence that two descriptors correspond: the negated distance.
inline double score(const Descriptor& a, const Descriptor& b) { return -distance(a, b); }

} // namespace patchbench
