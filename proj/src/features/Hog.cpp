/**
 * @file Hog.cpp
 */

#include <czi/features/Hog.h>
#include <czi/core/Error.h>
#include <czi/segment/Segmentation.h>

#include <cmath>
#include <numbers>
#include <string>

namespace czi::features {

using imaging::GrayImage;

Eigen::VectorXd HogBlock(const GrayImage& block, const HogParams& p) {
    if (block.Width() != p.blockWidth || block.Height() != p.blockHeight) {
        throw ParameterError("HogBlock: crop is " + std::to_string(block.Width()) + "x" +
                             std::to_string(block.Height()) + ", expected " + std::to_string(p.blockWidth) + "x" +
                             std::to_string(p.blockHeight));
    }
    const int cellsX = p.CellsX();
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(p.BlockDimension());
    const double binWidth = std::numbers::pi / p.bins;

    for (int y = 0; y < p.blockHeight; ++y) {
        for (int x = 0; x < p.blockWidth; ++x) {
            const double gx = block.AtClamped(x + 1, y) - block.AtClamped(x - 1, y);
            const double gy = block.AtClamped(x, y + 1) - block.AtClamped(x, y - 1);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) {
                continue;
            }
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) {
                theta += std::numbers::pi;
            }
            if (theta >= std::numbers::pi) {
                theta -= std::numbers::pi;
            }
            const double t = theta / binWidth - 0.5;
            const int b0 = static_cast<int>(std::floor(t));
            const double frac = t - b0;
            const int lo = (b0 + p.bins) % p.bins;
            const int hi = (b0 + 1) % p.bins;
            const int cell = (y / p.cellHeight) * cellsX + (x / p.cellWidth);
            hist[cell * p.bins + lo] += (1.0 - frac) * mag;
            hist[cell * p.bins + hi] += frac * mag;
        }
    }
    const double norm = std::sqrt(hist.squaredNorm() + p.epsilon * p.epsilon);
    return hist / norm;
}

Descriptor Ahog(const GrayImage& pixels, const HogParams& p) {
    constexpr int kBlocksPerSide = 6;
    constexpr int kCanonicalWidth = 62;
    constexpr int kCanonicalHeight = 48;
    if (pixels.Width() != kCanonicalWidth || pixels.Height() != kCanonicalHeight ||
        kBlocksPerSide * p.blockWidth > kCanonicalWidth || kBlocksPerSide * p.blockHeight > kCanonicalHeight) {
        throw ParameterError("Ahog: sub-region must be canonical 62x48, got " + std::to_string(pixels.Width()) +
                             "x" + std::to_string(pixels.Height()));
    }
    Descriptor d;
    d.kind = DescriptorKind::AHOG;
    d.values.resize(kBlocksPerSide * kBlocksPerSide * p.BlockDimension());
    int offset = 0;
    for (int by = 0; by < kBlocksPerSide; ++by) {
        for (int bx = 0; bx < kBlocksPerSide; ++bx) {
            const Rect r{bx * p.blockWidth, by * p.blockHeight, p.blockWidth, p.blockHeight};
            d.values.segment(offset, p.BlockDimension()) = HogBlock(pixels.Crop(r), p);
            offset += p.BlockDimension();
        }
    }
    return d;
}

Descriptor Ahog(const segment::SubRegion& sr, const HogParams& p) {
    Descriptor d = Ahog(sr.pixels, p);
    d.origin = sr.bounds;
    return d;
}

} // namespace czi::features
