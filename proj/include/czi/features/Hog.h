/**
 * @file Hog.h
 * @brief HOG blocks and their aggregation over a canonical sub-region (A-HOG)
 *
 * A block is 10 px wide and 8 px tall, split into 2 x 2 cells of 5 x 4 px.
 * Each cell holds a 9-bin unsigned orientation histogram (bins centred at
 * 10, 30, ..., 170 degrees, linear vote splitting, gradient-magnitude weights)
 * computed from [-1,0,1] differences with edge replication at the block border.
 * The 36 values are L2-normalized as v / sqrt(|v|^2 + eps^2).
 *
 * A-HOG tiles the 62 x 48 sub-region with a 6 x 6 grid of non-overlapping
 * blocks (the two rightmost columns are not covered) and concatenates them
 * row-major: 36 x 36 = 1296 values.
 */

#pragma once

#include <czi/features/Descriptor.h>
#include <czi/imaging/GrayImage.h>

namespace czi::segment {
struct SubRegion;
}

namespace czi::features {

struct HogParams {
    int blockWidth = 10;
    int blockHeight = 8;
    int cellWidth = 5;
    int cellHeight = 4;
    int bins = 9;
    double epsilon = 1e-6;

    int CellsX() const { return blockWidth / cellWidth; }
    int CellsY() const { return blockHeight / cellHeight; }
    int BlockDimension() const { return CellsX() * CellsY() * bins; }
};

/// One normalized block histogram. Throws ParameterError unless the crop is block-sized.
Eigen::VectorXd HogBlock(const imaging::GrayImage& block, const HogParams& params = {});

/// A-HOG of a canonical 62 x 48 crop. Throws ParameterError for other sizes.
Descriptor Ahog(const imaging::GrayImage& subregionPixels, const HogParams& params = {});

Descriptor Ahog(const segment::SubRegion& sr, const HogParams& params = {});

} // namespace czi::features
