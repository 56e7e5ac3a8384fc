/**
 * @file Roc.cpp
 */

#include <czi/core/Error.h>
#include <czi/eval/Roc.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace czi::eval {

RocCurve Roc(std::span<const ScoredLabel> scores, bool higherIsPositive) {
    long positives = 0;
    for (const ScoredLabel& s : scores) {
        positives += s.positive ? 1 : 0;
    }
    const long negatives = static_cast<long>(scores.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw DataError("ROC needs at least one positive and one negative unit");
    }
    std::vector<ScoredLabel> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), [&](const ScoredLabel& a, const ScoredLabel& b) {
        return higherIsPositive ? a.score > b.score : a.score < b.score;
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, higherIsPositive ? std::numeric_limits<double>::infinity()
                                                       : -std::numeric_limits<double>::infinity()});
    long tp = 0, fp = 0;
    double area = 0.0;
    for (size_t i = 0; i < sorted.size();) {
        const double t = sorted[i].score;
        const long tp0 = tp, fp0 = fp;
        for (; i < sorted.size() && sorted[i].score == t; ++i) {
            (sorted[i].positive ? tp : fp) += 1;
        }
        // Trapezoid in count units; one division at the end keeps the sum exact for integer steps.
        area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0) * 0.5;
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                                static_cast<double>(tp) / static_cast<double>(positives), t});
    }
    curve.auc = area / (static_cast<double>(positives) * static_cast<double>(negatives));
    return curve;
}

std::string RocCsvHeader() {
    return "stage,threshold,fpr,tpr\n";
}

std::string RocToCsv(const RocCurve& curve, const std::string& stage) {
    std::ostringstream out;
    char buf[96];
    for (const RocPoint& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p.threshold, p.falsePositiveRate, p.truePositiveRate);
        out << stage << ',' << buf << '\n';
    }
    return out.str();
}

} // namespace czi::eval
