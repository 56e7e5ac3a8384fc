/**
 * @file Manifest.h
 * @brief Ground-truth manifest written next to a generated corpus
 *
 * JSON document:
 * {
 *   "format": "czi-manifest", "version": 1,
 *   "images": [ { "image": "normal_000.png", "defective": false, "seed": ..., "layout_phase": ...,
 *                 "subregion_rows": 4, "subregion_cols": 3, "primitives_per_subregion": 3,
 *                 "subregion_defective": [0,...], "primitive_defective": [0,...],
 *                 "subregion_bounds": [[x,y,w,h],...],
 *                 "defects": [ {"kind": "Hole", "row": r, "col": c, "magnitude": m, "extent": e} ] } ]
 * }
 * Image paths are relative to the manifest's directory.
 */

#pragma once

#include <czi/core/Rect.h>
#include <czi/synth/Fabric.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace czi::synth {

struct ManifestEntry {
    std::string image;
    bool defective = false;
    uint64_t seed = 0;
    int layoutPhase = 0;
    int subregionRows = 0;
    int subregionCols = 0;
    int primitivesPerSubregion = 3;
    std::vector<uint8_t> subregionDefective;
    std::vector<uint8_t> primitiveDefective;
    std::vector<Rect> subregionBounds;
    std::vector<DefectSpec> defects;

    int PrimitiveCols() const { return subregionCols * primitivesPerSubregion; }
};

struct Manifest {
    std::filesystem::path baseDir;
    std::vector<ManifestEntry> entries;

    std::filesystem::path ImagePath(const ManifestEntry& e) const { return baseDir / e.image; }
};

ManifestEntry MakeEntry(const std::string& image, const GroundTruth& truth);

void WriteManifest(const Manifest& manifest, const std::filesystem::path& path);

/// Throws DataError on unreadable or malformed manifests.
Manifest ReadManifest(const std::filesystem::path& path);

} // namespace czi::synth
