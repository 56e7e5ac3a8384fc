/**
 * @file Filter.h
 * @brief Separable Gaussian smoothing with edge replication
 */

#pragma once

#include <czi/imaging/GrayImage.h>

#include <vector>

namespace czi::imaging {

struct SmoothingParams {
    double sigma = 1.0;
    int radius = 2;
};

/// Normalized 1-D Gaussian taps for offsets -radius..radius.
std::vector<double> GaussianKernel1D(double sigma, int radius);

/// Separable Gaussian blur. Throws ParameterError for sigma <= 0 or radius < 1.
GrayImage GaussianSmooth(const GrayImage& img, double sigma, int radius);

inline GrayImage GaussianSmooth(const GrayImage& img, const SmoothingParams& p) {
    return GaussianSmooth(img, p.sigma, p.radius);
}

} // namespace czi::imaging
