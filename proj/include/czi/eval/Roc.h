/**
 * @file Roc.h
 * @brief ROC curve by threshold sweep with trapezoidal area
 */

#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace czi::eval {

struct ScoredLabel {
    double score = 0.0;
    bool positive = false;
};

struct RocPoint {
    double falsePositiveRate = 0.0;
    double truePositiveRate = 0.0;
    double threshold = std::numeric_limits<double>::infinity(); ///< units at or beyond it are called positive
};

struct RocCurve {
    std::vector<RocPoint> points; ///< from (0, 0) to (1, 1), non-decreasing in both rates
    double auc = 0.0;
};

/**
 * @brief Sweep every distinct score as a threshold.
 *
 * With @p higherIsPositive a unit is called positive when its score is at or
 * above the threshold, otherwise at or below it. Tied scores move together,
 * so the area equals the Mann-Whitney statistic with ties counted as half.
 * Throws DataError unless both classes are present.
 */
RocCurve Roc(std::span<const ScoredLabel> scores, bool higherIsPositive = true);

/// stage,threshold,fpr,tpr
std::string RocCsvHeader();
std::string RocToCsv(const RocCurve& curve, const std::string& stage);

} // namespace czi::eval
