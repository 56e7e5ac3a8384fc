/**
 * @file Filter.cpp
 */

#include <czi/imaging/Filter.h>
#include <czi/core/Error.h>

#include <algorithm>
#include <cmath>

namespace czi::imaging {

std::vector<double> GaussianKernel1D(double sigma, int radius) {
    if (!(sigma > 0.0)) {
        throw ParameterError("GaussianKernel1D: sigma must be > 0");
    }
    if (radius < 1) {
        throw ParameterError("GaussianKernel1D: radius must be >= 1");
    }
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
        taps[i + radius] = w;
        sum += w;
    }
    for (double& w : taps) {
        w /= sum;
    }
    return taps;
}

GrayImage GaussianSmooth(const GrayImage& img, double sigma, int radius) {
    const std::vector<double> taps = GaussianKernel1D(sigma, radius);
    const int w = img.Width();
    const int h = img.Height();
    if (img.Empty()) {
        return img;
    }

    // Rows first, then columns; both passes clamp coordinates.
    std::vector<double> tmp(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[k + radius] * img(std::clamp(x + k, 0, w - 1), y);
            }
            tmp[static_cast<size_t>(y) * w + x] = acc;
        }
    }

    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[k + radius] * tmp[static_cast<size_t>(std::clamp(y + k, 0, h - 1)) * w + x];
            }
            out(x, y) = acc;
        }
    }
    // Convex combinations stay in range up to rounding.
    out.ClampToUnit();
    return out;
}

} // namespace czi::imaging
