#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "patchbench/geometry.hpp"
#include "patchbench/image.hpp"
#include "patchbench/rng.hpp"

namespace patchbench {

enum class SequenceKind
{
    Viewpoint,
    Illumination,
};

const char* sequence_kind_name(SequenceKind kind);

/// One reference image plus 5 targets related to it by known homographies.
/// Illumination sequences carry identity homographies.
struct Sequence
{
    std::string id;
    SequenceKind kind = SequenceKind::Viewpoint;
    Image ref;
    std::array<Image, 5> targets;
    std::array<Homography, 5> homographies;
};

/// Recipe for one synthetic sequence. Severities must be strictly
/// increasing in [0, 1]; target k is generated at severity[k], so targets
/// are sorted by increasing transformation.
struct SequenceSpec
{
    std::uint64_t seed = 0;
    SequenceKind kind = SequenceKind::Viewpoint;
    std::array<double, 5> severity = {0.2, 0.4, 0.6, 0.8, 1.0};
    int width = 256;
    int height = 256;
    std::string id;
};

/// Deterministic multi-octave value-noise texture with soft blobs and step
/// edges mixed in, so gradient orientation histograms are non-degenerate.
/// Output is snapped to the 8-bit grid; mean intensity lands in [0.3, 0.7].
Image gen_texture(std::uint64_t seed, int width, int height);

/// Backward-warp an image by a homography (output(x) = input(h^-1 x)),
/// bilinear sampling with clamp-to-edge fill. No quantization.
Image warp_image(const Image& img, const Homography& h);

/// Pointwise photometric map: clamp(gain * v + bias)^gamma attenuated by a
/// radial vignette of the given strength, clamped back to [0, 1].
struct PhotometricParams
{
    double gain = 1.0;
    double bias = 0.0;
    double gamma = 1.0;
    double vignette = 0.0;
};

Image apply_photometric(const Image& img, const PhotometricParams& params);

/// Generate a viewpoint sequence: 5 homographies with rotation, zoom,
/// perspective and translation magnitudes scaled by the severity schedule.
/// Homographies that fold the image domain are resampled (up to 100 tries).
Sequence gen_viewpoint_sequence(const SequenceSpec& spec);

/// Generate an illumination sequence: identity homographies, severity-scaled
/// gain/bias/gamma/vignette applied to the reference.
Sequence gen_illum_sequence(const SequenceSpec& spec);

/// Photometric parameters used for target k of an illumination sequence.
/// Exposed so tests can reproduce targets pointwise.
PhotometricParams illum_params(const SequenceSpec& spec, int target_index);

/// Multi-scale Laplacian-extremum keypoints with scales >= 1.6px.
/// Near-duplicates (IoU >= 0.5 at detection scale) are clustered and one
/// random member survives per cluster; the result is uniformly subsampled
/// to max_regions. Throws GenerationError when fewer than 8 regions remain.
std::vector<RegionDetection> detect_regions(const Image& img, Rng& rng,
                                            int max_regions);

} // namespace patchbench
