/**
 * @file Detector.h
 * @brief Training of the full cascade and whole-image detection
 */

#pragma once

#include <czi/cascade/AhogNet.h>
#include <czi/cascade/Config.h>
#include <czi/cascade/SiftNet.h>
#include <czi/imaging/GrayImage.h>
#include <czi/segment/Segmentation.h>

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace czi::cascade {

struct CascadeModel {
    CascadeConfig config;
    segment::PrimitiveClassifier classifier;
    AhogModel ahog;
    SiftModel sift;
};

/// Per-image training statistics, useful for logging.
struct TrainingSummary {
    int images = 0;
    int subregions = 0;
    int primitives = 0;
};

/**
 * @brief Train classifier, A-HOG dictionaries and SIFT templates from defect-free images.
 *
 * Throws SegmentationError or ClassificationError when a training image does
 * not parse as a clean lattice.
 */
CascadeModel TrainCascade(std::span<const imaging::GrayImage> normals, const CascadeConfig& config,
                          TrainingSummary* summary = nullptr);

struct PrimitiveReport {
    Rect bounds;
    int row = 0;
    int col = 0;
    PrimitiveKind kind = PrimitiveKind::Star1;
    double rho = 0.0;
    SiftResult result;
};

struct SubRegionReport {
    Rect bounds;
    int gridRow = 0;
    int gridCol = 0;
    segment::SizeClass sizeClass;
    SubRegionKind kind = SubRegionKind::Subregion1;
    bool rowOrderAnomaly = false; ///< outer rows did not carry the motif the middle row implies
    double epsilon = 0.0;
    double theta = 0.0;
    bool stage1Defective = false;
    bool enteredStage2 = false;
    bool defective = false;        ///< after the cascade (stage 2 may clear a stage-1 flag)
    std::vector<PrimitiveReport> primitives;
};

struct StageTimings {
    double stage1Ms = 0.0; ///< smoothing, segmentation, classification, A-HOG and LCRE
    double stage2Ms = 0.0; ///< dense SIFT, restrictive coding and template matching
    double totalMs = 0.0;
};

struct DetectionReport {
    std::string image;
    bool defective = false;
    std::vector<SubRegionReport> subregions;
    StageTimings timings;
    std::string error; ///< non-empty when the image could not be analysed
};

struct DetectOptions {
    bool exhaustiveStage2 = false; ///< run stage 2 on every sub-region (evaluation only)
    int threads = 1;
};

/**
 * @brief Cascade on one image.
 *
 * Sub-regions whose LCRE passes the threshold stop after stage 1. Flagged
 * sub-regions are cut into primitives and tested by stage 2; a flagged
 * sub-region whose primitives all pass is cleared. The image is defective iff
 * any sub-region remains defective. Segmentation errors propagate.
 */
DetectionReport DetectImage(const imaging::GrayImage& img, const CascadeModel& model, const DetectOptions& options = {});

nlohmann::json ReportToJson(const DetectionReport& report, bool includeTimings);
DetectionReport ReportFromJson(const nlohmann::json& j);

/// Header line of the flat CSV form.
std::string ReportCsvHeader();
/// One row per sub-region and per tested primitive.
std::string ReportToCsv(const DetectionReport& report);

nlohmann::json ModelToJson(const CascadeModel& model);
CascadeModel ModelFromJson(const nlohmann::json& j);
void SaveModel(const CascadeModel& model, const std::filesystem::path& path);
CascadeModel LoadModel(const std::filesystem::path& path);

} // namespace czi::cascade
