#include "patchbench/image.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace patchbench {

float sample_bilinear(const Image& img, double x, double y)
{
    const int w = image_width(img);
    const int h = image_height(img);
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(x), w - 2 >= 0 ? w - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), h - 2 >= 0 ? h - 2 : 0);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = img(y0, x0), v01 = img(y0, x1);
    const double v10 = img(y1, x0), v11 = img(y1, x1);
    const double top = v00 + fx * (v01 - v00);
    const double bot = v10 + fx * (v11 - v10);
    return static_cast<float>(top + fy * (bot - top));
}

Image gaussian_blur(const Image& img, double sigma)
{
    if (sigma <= 0.0)
        return img;

    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel)
        k /= sum;

    const int w = image_width(img);
    const int h = image_height(img);
    Image tmp(h, w);
    Image out(h, w);

    // Horizontal pass.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * img(y, std::clamp(x + i, 0, w - 1));
            tmp(y, x) = static_cast<float>(acc);
        }
    // Vertical pass.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp(std::clamp(y + i, 0, h - 1), x);
            out(y, x) = static_cast<float>(acc);
        }
    return out;
}

Image quantize_unit(const Image& img)
{
    return ((img.min(1.0f).max(0.0f) * 255.0f + 0.5f).floor()) / 255.0f;
}

Patch quantize_unit(const Patch& p)
{
    return ((p.min(1.0f).max(0.0f) * 255.0f + 0.5f).floor()) / 255.0f;
}

} // namespace patchbench
