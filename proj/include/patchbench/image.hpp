#pragma once

#include <Eigen/Core>

namespace patchbench {

/// Grayscale image, intensities in [0, 1]. pixels(y, x) indexing; row-major
/// storage so rows are contiguous scanlines.
using Image = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kPatchSide = 65;

/// A rectified patch: fixed 65x65 grayscale square in [0, 1].
using Patch = Eigen::Array<float, kPatchSide, kPatchSide, Eigen::RowMajor>;

inline int image_width(const Image& img) { return static_cast<int>(img.cols()); }
inline int image_height(const Image& img) { return static_cast<int>(img.rows()); }

/// Bilinear sample at (x, y) in pixel-center coordinates, clamping to the
/// image border (edge extension).
float sample_bilinear(const Image& img, double x, double y);

/// Separable Gaussian blur, kernel truncated at 3 sigma, borders clamped.
/// sigma <= 0 returns the input unchanged.
Image gaussian_blur(const Image& img, double sigma);

/// Snap intensities to the 256-level grid used by 8-bit storage. Keeps
/// in-memory pixels identical to what a PGM round trip reproduces.
Image quantize_unit(const Image& img);

/// Same snapping for a fixed-size patch.
Patch quantize_unit(const Patch& p);

} // namespace patchbench
