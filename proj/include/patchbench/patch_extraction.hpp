#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patchbench/geometry.hpp"
#include "patchbench/image.hpp"
#include "patchbench/synthesis.hpp"

namespace patchbench {

/// The three benchmark noise variants, in storage order.
inline constexpr std::array<NoiseLevel, 3> kVariants = {
    NoiseLevel::Easy, NoiseLevel::Hard, NoiseLevel::Tough};

inline constexpr char kVariantTag[3] = {'e', 'h', 't'};

inline int variant_index(NoiseLevel level)
{
    switch (level) {
    case NoiseLevel::Easy:
        return 0;
    case NoiseLevel::Hard:
        return 1;
    case NoiseLevel::Tough:
        return 2;
    default:
        return -1;
    }
}

/// Patches of one sequence: N retained regions, each with a noise-free
/// reference patch and, per variant, 5 noisy target patches (index
/// group * 5 + target). Groups are complete across variants by construction.
struct SequencePatches
{
    std::string id;
    SequenceKind kind = SequenceKind::Viewpoint;
    bool has_geometry = true;
    std::array<Homography, 5> homographies;

    std::vector<int> region_ids;
    std::vector<RegionDetection> regions; // reference-frame detections, oriented
    std::vector<Patch> ref;               // one per group
    std::array<std::vector<Patch>, 3> targets; // per variant, N * 5

    // Noise transform drawn for (group, target, variant). Populated when the
    // patches were built in-process; not persisted to disk.
    std::array<std::vector<NoiseTransform>, 3> noise;

    // Source images and full detection list, kept so the corpus can be
    // persisted and re-extracted at other measurement scales. Absent on
    // externally ingested data.
    std::optional<Sequence> source;
    std::vector<RegionDetection> all_detections;

    int group_count() const { return static_cast<int>(region_ids.size()); }
    const Patch& target_patch(NoiseLevel v, int group, int target) const
    {
        return targets[variant_index(v)][group * 5 + target];
    }
};

/// A corpus: several sequences plus the fitting/evaluation split used by
/// descriptor post-processing.
struct PatchCorpus
{
    std::uint64_t master_seed = 0;
    double rho = 5.0;
    std::vector<SequencePatches> sequences;
    std::vector<int> fit_split; // indices into sequences; the rest evaluate

    std::vector<int> eval_split() const;
};

/// Dominant gradient orientation over the rho=5 measurement region:
/// 36-bin histogram of Gaussian-weighted gradient magnitudes, peak refined
/// by parabolic interpolation. Degenerate (constant) regions return 0.
/// Precondition: the rho=5 frame lies fully inside the image.
double dominant_orientation(const Image& img, const RegionDetection& r);

/// Sample a 65x65 patch over an arbitrary projective frame mapping
/// normalized coordinates [-1,1]^2 into the image (bilinear, clamped).
Patch warp_patch(const Image& img, const Eigen::Matrix3d& frame);

/// Rectify the measurement region of r (half-extent rho * m, de-rotated by
/// r.theta) to a 65x65 patch. Throws std::out_of_range when the frame
/// exceeds the image domain.
Patch extract_patch(const Image& img, const RegionDetection& r, double rho = 5.0);

/// Conservative containment test used to drop regions near the borders: the
/// region must keep its reference support (max(rho, 5) for orientation) and
/// its Tough-inflated noisy support inside every target image.
bool region_fully_contained(const Sequence& seq, const RegionDetection& r, double rho);

/// Options of build_sequence_patches beyond the extraction scale.
struct BuildOptions
{
    std::array<NoiseProfile, 3> profiles;
    /// Containment is checked at this rho (>= extraction rho). The rho sweep
    /// sets it to the largest swept value so every rho shares one region set.
    double containment_rho = 0.0; // 0: use the extraction rho

    BuildOptions();
};

/// The Easy/Hard/Tough preset triple.
std::array<NoiseProfile, 3> default_noise_profiles();

/// Build the per-variant patch groups of one sequence. Noise draws come
/// from substreams keyed by (noise_seed, region id, target, variant), so
/// results do not depend on evaluation order and stay fixed when the
/// extraction rho changes. Regions failing containment at the Tough bound
/// in any image are dropped entirely, so every variant shares one region
/// set. Throws GenerationError when no region survives.
SequencePatches build_sequence_patches(const Sequence& seq,
                                       const std::vector<RegionDetection>& regions,
                                       double rho, std::uint64_t noise_seed,
                                       const BuildOptions& options = BuildOptions());

} // namespace patchbench
