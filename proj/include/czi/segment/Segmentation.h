/**
 * @file Segmentation.h
 * @brief Two-level lattice segmentation from projection-curve minima
 *
 * Motif centres are the minima of the projection curves. Rule I groups the
 * minima of the whole image three by three into sub-regions, measures each raw
 * cell (its size class), pads it, re-locates the minima locally and cuts the
 * canonical 62 x 48 window. Rule II cuts the nine 20 x 16 primitives around the
 * local minima of a sub-region with fixed lengths (9 left / 10 right,
 * 7 above / 8 below the minimum).
 *
 * A group is accepted when at least two of its three minima sit on a common
 * lattice anchor; the third position is then taken from the lattice. This keeps
 * the grid intact when a defect shifts or erases one minimum.
 */

#pragma once

#include <czi/core/Kinds.h>
#include <czi/core/Rect.h>
#include <czi/imaging/Filter.h>
#include <czi/imaging/GrayImage.h>

#include <optional>
#include <span>
#include <vector>

namespace czi::segment {

struct SegmentationParams {
    int primitiveWidth = 20;
    int primitiveHeight = 16;
    int primitivesPerSide = 3;
    int motifOffsetX = 9;   ///< columns left of the minimum; 10 lie right of it
    int motifOffsetY = 7;   ///< rows above the minimum; 8 lie below it
    int subregionWidth = 62;
    int subregionHeight = 48;
    int padding = 3;
    std::vector<int> widthRange = {62, 63, 64, 65};
    std::vector<int> heightRange = {48, 49, 50};
    double minProminence = 0.02;
    imaging::SmoothingParams smoothing;

    int MinSeparationX() const { return primitiveWidth * 3 / 5; }
    int MinSeparationY() const { return primitiveHeight * 3 / 5; }
};

/// Measured raw-cell geometry; (lh, lv) is the dictionary key.
struct SizeClass {
    int lh = 0; ///< raw cell width
    int lv = 0; ///< raw cell height
    int h1 = 0, h2 = 0; ///< margins left of the first / right of the last column minimum
    int v1 = 0, v2 = 0; ///< margins above the first / below the last row minimum

    bool SameKey(const SizeClass& o) const { return lh == o.lh && lv == o.lv; }
};

struct SubRegion {
    Rect bounds;                         ///< canonical window in image coordinates
    std::optional<SubRegionKind> kind;   ///< set by ClassifySubregion
    SizeClass sizeClass;
    imaging::GrayImage pixels;           ///< canonical crop
    imaging::GrayImage context;          ///< crop of bounds padded by `padding`
    int padding = 0;
    int gridRow = 0;
    int gridCol = 0;
};

struct Primitive {
    Rect bounds;
    std::optional<PrimitiveKind> kind;
    imaging::GrayImage pixels;
    int row = 0; ///< within its sub-region
    int col = 0;
};

/// Cut a sub-region (canonical crop plus padded context) at an explicit window.
SubRegion MakeSubRegion(const imaging::GrayImage& img, const Rect& bounds, int padding);

/**
 * @brief Rule I on an already smoothed image.
 *
 * Returns sub-regions in row-major grid order with kind unset. Throws
 * SegmentationError (with a projection dump) when an axis has no group of
 * lattice-spaced minima or a raw cell falls outside the configured size ranges.
 */
std::vector<SubRegion> SegmentRule1(const imaging::GrayImage& smoothed, const SegmentationParams& params = {});

/// Rule II: nine primitives, row-major. Falls back to the nominal lattice positions of the canonical
/// window along an axis whose local minima do not agree.
std::vector<Primitive> SegmentRule2(const SubRegion& sr, const SegmentationParams& params = {});

/// Star-1 / star-2 decision on the minimum of a primitive's column projection.
struct PrimitiveClassifier {
    double midpoint = 0.0;
    double star1Mean = 0.0;
    double star2Mean = 0.0;
};

double PrimitiveProjectionMinimum(const imaging::GrayImage& primitivePixels);

/// Unsupervised calibration: two-means on the projection minima. Needs both motifs present.
PrimitiveClassifier CalibrateClassifier(std::span<const Primitive> primitives);

/// Supervised calibration from labelled crops.
PrimitiveClassifier CalibrateClassifier(std::span<const Primitive> primitives,
                                        std::span<const PrimitiveKind> labels);

PrimitiveKind ClassifyPrimitive(const Primitive& p, const PrimitiveClassifier& classifier);

/// Row-by-row motif reading of a sub-region; the kind follows the middle row.
struct SubregionReading {
    SubRegionKind kind = SubRegionKind::Subregion1;
    std::vector<PrimitiveKind> rowKinds;
    int inconsistentRow = -1; ///< first row disagreeing with `kind`, or -1
    bool Consistent() const { return inconsistentRow < 0; }
};

SubregionReading ReadSubregion(std::span<const Primitive> primitives, const PrimitiveClassifier& classifier,
                               int primitivesPerSide = 3);

/**
 * @brief Sub-region kind from the row ordering of its primitives.
 *
 * Each row takes the majority label of its three primitives. The middle row
 * decides the kind (star-2 middle row means Subregion1); the outer rows must
 * carry the opposite motif, otherwise ClassificationError is thrown.
 */
SubRegionKind ClassifySubregion(std::span<const Primitive> primitives, const PrimitiveClassifier& classifier,
                                int primitivesPerSide = 3);

SubRegionKind ClassifySubregion(const SubRegion& sr, const PrimitiveClassifier& classifier,
                                const SegmentationParams& params = {});

/// Copy of @p img with sub-region outlines in white and primitive outlines in black.
imaging::GrayImage DrawOverlay(const imaging::GrayImage& img, std::span<const SubRegion> subregions,
                               std::span<const Primitive> primitives);

} // namespace czi::segment
