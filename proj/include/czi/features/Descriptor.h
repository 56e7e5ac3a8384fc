/**
 * @file Descriptor.h
 * @brief Fixed-length feature vector with provenance
 */

#pragma once

#include <czi/core/Rect.h>

#include <Eigen/Core>

namespace czi::features {

enum class DescriptorKind { AHOG, SIFT };

constexpr int kAhogDimension = 1296;
constexpr int kSiftDimension = 128;

struct Descriptor {
    Eigen::VectorXd values;
    DescriptorKind kind = DescriptorKind::SIFT;
    Rect origin; ///< source window in image coordinates
};

} // namespace czi::features
