/**
 * @file Fabric.h
 * @brief Procedural star-patterned fabric with defect injection and ground truth
 *
 * Lattice geometry (all sizes in pixels):
 *   - a primitive cell is 20 wide x 16 tall with its motif centred on pixel (9, 7);
 *   - a sub-region is 3 x 3 primitive cells followed by a trailing background gap
 *     (column gap to the right, row gap below);
 *   - primitive rows alternate star-1 / star-2, so sub-region rows alternate
 *     Subregion1 / Subregion2.
 * Gap widths cycle through configured values by layout phase, which makes the
 * measured sub-region size vary from image to image.
 */

#pragma once

#include <czi/core/Kinds.h>
#include <czi/core/Rect.h>
#include <czi/imaging/GrayImage.h>

#include <cstdint>
#include <string_view>
#include <vector>

namespace czi::synth {

/// Anti-aliased eight-point star, dark on the background.
struct MotifStamp {
    double outerRadius = 5.0;
    double innerRadius = 2.2;
    double intensity = 0.15;
};

struct FabricSpec {
    int primitiveWidth = 20;
    int primitiveHeight = 16;
    int primitivesPerSubregion = 3;   ///< per side
    int subregionCols = 3;
    int subregionRows = 4;            ///< 3 x 4 = 12 sub-regions per image
    std::vector<int> columnGaps = {2, 3, 4, 5};
    std::vector<int> rowGaps = {0, 1, 2};
    int layoutPhase = 0;
    double background = 0.62;
    MotifStamp star1 = {5.0, 2.2, 0.15};
    MotifStamp star2 = {7.0, 3.0, 0.15};
    SubRegionKind topKind = SubRegionKind::Subregion1;
    double noiseAmplitude = 0.04;     ///< additive uniform noise in [-a, a]
    uint64_t seed = 1;
    /// Reject stamp pairs that the projection-minimum rule cannot tell apart.
    bool verifyMotifSeparation = true;

    /// Motif centre inside a primitive cell.
    int MotifCenterX() const { return (primitiveWidth - 1) / 2; }
    int MotifCenterY() const { return (primitiveHeight - 1) / 2; }
};

enum class DefectKind { BrokenEnd, Hole, ThickBar, ThinBar, NettingMultiple };

constexpr DefectKind kAllDefectKinds[] = {DefectKind::BrokenEnd, DefectKind::Hole, DefectKind::ThickBar,
                                          DefectKind::ThinBar, DefectKind::NettingMultiple};

std::string_view ToString(DefectKind kind);
DefectKind ParseDefectKind(std::string_view name);

struct DefectSpec {
    DefectKind kind = DefectKind::Hole;
    int primitiveRow = 0;   ///< global primitive lattice row
    int primitiveCol = 0;   ///< global primitive lattice column
    double magnitude = 0.5; ///< intensity delta
    double extent = 3.0;    ///< radius, bar thickness or dot-run length depending on kind
};

/// Typical magnitude and extent for each defect kind.
DefectSpec DefaultDefect(DefectKind kind, int primitiveRow, int primitiveCol);

/**
 * @brief Pixel-accurate labels for one rendered image.
 *
 * Sub-regions are indexed row-major over the sub-region grid; primitives
 * row-major over the global primitive lattice. Sub-region bounds are the
 * canonical crop windows (cells plus two columns of the trailing gap).
 */
struct GroundTruth {
    FabricSpec spec;
    int width = 0;
    int height = 0;
    std::vector<Rect> subregionBounds;
    std::vector<Rect> subregionCells;   ///< full cell including its trailing gaps
    std::vector<SubRegionKind> subregionKinds;
    std::vector<Rect> primitiveBounds;
    std::vector<PrimitiveKind> primitiveKinds;
    std::vector<uint8_t> subregionDefective;
    std::vector<uint8_t> primitiveDefective;
    std::vector<uint8_t> defectMask;     ///< width x height, 1 where any defect altered pixels
    std::vector<DefectSpec> defects;

    int PrimitiveRows() const { return spec.subregionRows * spec.primitivesPerSubregion; }
    int PrimitiveCols() const { return spec.subregionCols * spec.primitivesPerSubregion; }
    int PrimitiveIndex(int row, int col) const { return row * PrimitiveCols() + col; }
    bool AnyDefect() const;
};

struct FabricSample {
    imaging::GrayImage image;
    GroundTruth truth;
};

/// Throws ParameterError for a spec that cannot tile or whose motifs are not separable.
void ValidateSpec(const FabricSpec& spec);

/// Deterministic defect-free render for spec.seed.
FabricSample GenerateFabric(const FabricSpec& spec);

/**
 * @brief Apply one defect; only pixels inside its mask change.
 *
 * Hole darkens an ellipse in the cell's upper-right background, ThinBar and
 * ThickBar brighten a 1- or 4-row band across the whole image through the
 * motif centres, BrokenEnd erases the motif's upper stroke, NettingMultiple
 * places bright dots along a row spanning at least two cells.
 * Throws ParameterError when the defect falls outside the lattice or its
 * magnitude does not exceed the noise amplitude.
 */
FabricSample InjectDefect(const FabricSample& sample, const DefectSpec& defect);

/// Column-projection minimum of a clean cell holding the given stamp.
double StampProjectionMinimum(const FabricSpec& spec, const MotifStamp& stamp);

struct CorpusSpec {
    int normalCount = 25;
    int defectiveCount = 25;   ///< cycles through the five kinds
    uint64_t seed = 1;
    FabricSpec fabric;
};

struct CorpusItem {
    std::string name;
    bool defective = false;
    FabricSample sample;
};

/// Normal images first, then defective ones; image i uses layout phase i and a derived seed.
std::vector<CorpusItem> GenerateCorpus(const CorpusSpec& spec);

} // namespace czi::synth
