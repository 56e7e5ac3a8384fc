/**
 * @file Metrics.h
 * @brief Confusion counts and detection rates at image, sub-region and primitive level
 *
 * Reports are matched to manifest entries by image name. A primitive counts
 * as detected only when its sub-region entered the localization stage and the
 * primitive itself failed; primitives that were never examined are predicted
 * normal. Rates with an empty denominator are left unset rather than NaN.
 */

#pragma once

#include <czi/cascade/Detector.h>
#include <czi/eval/Roc.h>
#include <czi/synth/Manifest.h>

#include <optional>
#include <span>
#include <string_view>

namespace czi::eval {

enum class Level { Image, SubRegion, Primitive };

std::string_view ToString(Level level);

struct Confusion {
    long truePositive = 0;
    long falsePositive = 0;
    long trueNegative = 0;
    long falseNegative = 0;

    long Total() const { return truePositive + falsePositive + trueNegative + falseNegative; }
    long Positives() const { return truePositive + falseNegative; }
    long Negatives() const { return trueNegative + falsePositive; }
    void Add(bool predicted, bool actual);
};

struct Metrics {
    Level level = Level::Image;
    Confusion counts;
    double accuracy = 0.0;
    std::optional<double> recall;     ///< unset without actual defects
    std::optional<double> falseAlarm; ///< unset without actual normals
};

/// Throws DataError for an empty population.
Metrics ComputeMetrics(const Confusion& counts, Level level);

struct Evaluation {
    Metrics image;
    Metrics subregion;
    Metrics primitive;
    std::vector<ScoredLabel> stage1Scores; ///< one per reported sub-region
    std::vector<ScoredLabel> stage2Scores; ///< one per reported primitive
    bool stage1HigherIsDefective = true;
};

/**
 * @brief Score reports against ground truth.
 *
 * The stage-1 score is epsilon / theta so that sub-regions from different
 * dictionaries share one scale; the stage-2 score is the largest nearest-word
 * distance over the scope radius. Throws DataError when the report set is
 * empty, when an image appears twice or has no manifest entry, or when a
 * report's grid does not fit the entry.
 */
Evaluation ScoreReports(std::span<const cascade::DetectionReport> reports,
                        std::span<const synth::ManifestEntry> truth,
                        coding::LcreMode mode = coding::LcreMode::WeightedDistance);

/// level,total,tp,fp,tn,fn,accuracy,recall,false_alarm
std::string MetricsCsvHeader();
std::string MetricsToCsv(const Metrics& m);

} // namespace czi::eval
