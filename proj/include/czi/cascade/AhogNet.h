/**
 * @file AhogNet.h
 * @brief First cascade stage: A-HOG descriptors scored by LCRE against per-key dictionaries
 */

#pragma once

#include <czi/coding/Codebook.h>
#include <czi/coding/Coding.h>
#include <czi/core/Kinds.h>

#include <Eigen/Core>
#include <json.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>

namespace czi::cascade {

/// Dictionary key: measured raw cell size plus sub-region kind.
struct AhogKey {
    int lh = 0;
    int lv = 0;
    SubRegionKind kind = SubRegionKind::Subregion1;

    auto operator<=>(const AhogKey&) const = default;
    std::string ToString() const;
};

struct AhogParams {
    int words = 5;                                  ///< label-embedding dictionary size per key
    coding::CodingParams coding{1.0, 3, 1e-4, 1.0, 1.0};
    coding::LcreMode mode = coding::LcreMode::WeightedDistance;
    double margin = 0.10;                           ///< relative calibration margin on theta
    bool leaveOneOut = true;                        ///< include held-out LCRE values in calibration
    uint64_t seed = 1;
};

struct AhogEntry {
    coding::Codebook codebook;
    double theta = 0.0;
    double trainExtreme = 0.0; ///< max (or min, Eq9Literal) calibration LCRE before the margin
    int samples = 0;
};

struct AhogModel {
    AhogParams params;
    std::map<AhogKey, AhogEntry> entries;

    const AhogEntry& At(const AhogKey& key) const;
};

struct AhogSample {
    AhogKey key;
    Eigen::VectorXd descriptor;
};

/**
 * @brief Per-key K-Means dictionaries and LCRE thresholds from normal sub-regions.
 *
 * Throws ParameterError when a key has fewer samples than dictionary words.
 */
AhogModel TrainAhog(std::span<const AhogSample> samples, const AhogParams& params);

struct AhogResult {
    double epsilon = 0.0;
    double theta = 0.0;
    bool defective = false;
};

/// Throws DataError for a key absent from the model.
AhogResult AhogStage(const AhogKey& key, const Eigen::VectorXd& descriptor, const AhogModel& model);

/// Mode-aware threshold decision.
bool ExceedsThreshold(double epsilon, double theta, coding::LcreMode mode);

nlohmann::json AhogModelToJson(const AhogModel& model);
AhogModel AhogModelFromJson(const nlohmann::json& j, const AhogParams& params);

} // namespace czi::cascade
