/**
 * @file GrayImage.cpp
 */

#include <czi/imaging/GrayImage.h>
#include <czi/core/Error.h>

#include <algorithm>
#include <string>

namespace czi::imaging {

namespace {

void RequireSize(int width, int height) {
    if (width < 0 || height < 0) {
        throw ParameterError("GrayImage: negative size " + std::to_string(width) + "x" +
                             std::to_string(height));
    }
}

} // namespace

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
    RequireSize(width, height);
    if (!(fill >= 0.0 && fill <= 1.0)) {
        throw ParameterError("GrayImage: fill value outside [0,1]");
    }
    data_.assign(static_cast<size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    RequireSize(width, height);
    if (data_.size() != static_cast<size_t>(width) * height) {
        throw ParameterError("GrayImage: data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(width) + "x" +
                             std::to_string(height));
    }
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ParameterError("GrayImage: intensity outside [0,1]");
        }
    }
}

double GrayImage::AtClamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return (*this)(x, y);
}

GrayImage GrayImage::Crop(const Rect& r) const {
    if (Empty()) {
        throw ParameterError("GrayImage::Crop: empty source image");
    }
    GrayImage out(r.width, r.height);
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            out(x, y) = AtClamped(r.x + x, r.y + y);
        }
    }
    return out;
}

GrayImage GrayImage::Transposed() const {
    GrayImage out(height_, width_);
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            out(y, x) = (*this)(x, y);
        }
    }
    return out;
}

void GrayImage::ClampToUnit() {
    for (double& v : data_) {
        v = std::clamp(v, 0.0, 1.0);
    }
}

} // namespace czi::imaging
