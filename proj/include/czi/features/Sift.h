/**
 * @file Sift.h
 * @brief Dense SIFT descriptors at fixed positions along a primitive
 */

#pragma once

#include <czi/features/Descriptor.h>
#include <czi/imaging/GrayImage.h>

#include <vector>

namespace czi::segment {
struct Primitive;
}

namespace czi::features {

struct SiftParams {
    int patchSize = 16;
    int stride = 2;
    int spatialBins = 4;      ///< per side
    int orientationBins = 8;
    double clamp = 0.2;
    int primitiveWidth = 20;
    int primitiveHeight = 16;

    int PatchCount() const { return (primitiveWidth - patchSize) / stride + 1; }
};

/**
 * @brief SIFT descriptor of one square patch whose top-left corner is (x0, y0).
 *
 * Gradients come from [-1,0,1] differences over the whole image with edge
 * replication. Votes are Gaussian-weighted (sigma = patch/2), spread
 * bilinearly over the 4 x 4 spatial cells and linearly over 8 signed
 * orientation bins. The vector is L2-normalized, clamped at 0.2 and
 * re-normalized; a patch without gradient yields the zero vector.
 */
Eigen::VectorXd SiftPatch(const imaging::GrayImage& img, int x0, int y0, const SiftParams& params = {});

/// Patches at x = 0, stride, 2*stride, ... across the primitive: 3 descriptors for 20 x 16 crops.
std::vector<Descriptor> DenseSift(const imaging::GrayImage& primitivePixels, const SiftParams& params = {});

std::vector<Descriptor> DenseSift(const segment::Primitive& p, const SiftParams& params = {});

} // namespace czi::features
