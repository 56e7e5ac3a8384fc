/**
 * @file GrayImage.h
 * @brief Row-major grayscale raster with intensities in [0,1]
 */

#pragma once

#include <czi/core/Rect.h>

#include <span>
#include <vector>

namespace czi::imaging {

class GrayImage {
public:
    GrayImage() = default;

    /// Constant image. Throws ParameterError on negative size or fill outside [0,1].
    GrayImage(int width, int height, double fill = 0.0);

    /// Wraps existing samples. Throws ParameterError unless data.size() == width*height
    /// and every sample lies in [0,1].
    GrayImage(int width, int height, std::vector<double> data);

    int Width() const { return width_; }
    int Height() const { return height_; }
    bool Empty() const { return data_.empty(); }

    double operator()(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    double& operator()(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }

    /// Edge-replicated access: coordinates are clamped into the image.
    double AtClamped(int x, int y) const;

    std::span<const double> Data() const { return data_; }
    std::span<double> MutableData() { return data_; }

    /// Copy of the rectangle; samples outside the image are edge-replicated.
    GrayImage Crop(const Rect& r) const;

    GrayImage Transposed() const;

    /// Clamp every sample back into [0,1] after in-place edits.
    void ClampToUnit();

    bool operator==(const GrayImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

} // namespace czi::imaging
