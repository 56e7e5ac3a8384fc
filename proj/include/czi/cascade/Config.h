/**
 * @file Config.h
 * @brief All tunable defaults of the pipeline, loadable from JSON
 */

#pragma once

#include <czi/cascade/AhogNet.h>
#include <czi/cascade/SiftNet.h>
#include <czi/features/Hog.h>
#include <czi/features/Sift.h>
#include <czi/segment/Segmentation.h>

#include <json.hpp>

#include <cstdint>
#include <filesystem>

namespace czi::cascade {

struct CascadeConfig {
    segment::SegmentationParams segmentation;
    features::HogParams hog;
    features::SiftParams sift;
    AhogParams ahog;
    SiftNetParams siftNet;
    uint64_t seed = 1;
    int threads = 1;

    CascadeConfig() { ApplySeed(1); }

    /// Propagate the global seed into the per-stage seeds.
    void ApplySeed(uint64_t s);
};

/// Full configuration as JSON (every field written).
nlohmann::json ConfigToJson(const CascadeConfig& cfg);

/**
 * @brief Overlay the keys present in @p j onto @p base.
 *
 * Unknown keys are rejected so that typos surface as ParameterError.
 */
CascadeConfig ConfigFromJson(const nlohmann::json& j, CascadeConfig base = {});

CascadeConfig LoadConfig(const std::filesystem::path& path, CascadeConfig base = {});

/// 64-bit FNV-1a of the canonical JSON of every result-affecting field (threads excluded), as 16 hex digits.
std::string ConfigHash(const CascadeConfig& cfg);

/// Throws ParameterError on inconsistent values.
void ValidateConfig(const CascadeConfig& cfg);

} // namespace czi::cascade
