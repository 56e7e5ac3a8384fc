/**
 * @file Metrics.cpp
 */

#include <czi/core/Error.h>
#include <czi/eval/Metrics.h>

#include <cstdio>
#include <map>

namespace czi::eval {

std::string_view ToString(Level level) {
    switch (level) {
        case Level::Image:
            return "image";
        case Level::SubRegion:
            return "subregion";
        case Level::Primitive:
            return "primitive";
    }
    return "image";
}

void Confusion::Add(bool predicted, bool actual) {
    if (actual) {
        (predicted ? truePositive : falseNegative) += 1;
    } else {
        (predicted ? falsePositive : trueNegative) += 1;
    }
}

Metrics ComputeMetrics(const Confusion& c, Level level) {
    if (c.Total() == 0) {
        throw DataError(std::string("no ") + std::string(ToString(level)) + "-level units to score");
    }
    Metrics m;
    m.level = level;
    m.counts = c;
    m.accuracy = static_cast<double>(c.truePositive + c.trueNegative) / static_cast<double>(c.Total());
    if (c.Positives() > 0) {
        m.recall = static_cast<double>(c.truePositive) / static_cast<double>(c.Positives());
    }
    if (c.Negatives() > 0) {
        m.falseAlarm = static_cast<double>(c.falsePositive) / static_cast<double>(c.Negatives());
    }
    return m;
}

Evaluation ScoreReports(std::span<const cascade::DetectionReport> reports,
                        std::span<const synth::ManifestEntry> truth, coding::LcreMode mode) {
    if (reports.empty()) {
        throw DataError("no detection reports to score");
    }
    std::map<std::string, const synth::ManifestEntry*> byName;
    for (const synth::ManifestEntry& e : truth) {
        byName[e.image] = &e;
    }
    Evaluation ev;
    ev.stage1HigherIsDefective = mode == coding::LcreMode::WeightedDistance;
    Confusion image, sub, prim;
    std::map<std::string, int> seen;
    for (const cascade::DetectionReport& r : reports) {
        const auto it = byName.find(r.image);
        if (it == byName.end()) {
            throw DataError("report for '" + r.image + "' has no ground-truth entry");
        }
        if (++seen[r.image] > 1) {
            throw DataError("image '" + r.image + "' is reported twice");
        }
        const synth::ManifestEntry& t = *it->second;
        image.Add(r.defective, t.defective);

        const int per = t.primitivesPerSubregion;
        const size_t subCount = static_cast<size_t>(t.subregionRows) * static_cast<size_t>(t.subregionCols);
        std::vector<uint8_t> subPredicted(subCount, 0);
        std::vector<uint8_t> primPredicted(t.primitiveDefective.size(), 0);
        for (const cascade::SubRegionReport& s : r.subregions) {
            if (s.gridRow < 0 || s.gridCol < 0 || s.gridRow >= t.subregionRows || s.gridCol >= t.subregionCols) {
                throw DataError("report for '" + r.image + "' has a sub-region outside the ground-truth grid");
            }
            const size_t si = static_cast<size_t>(s.gridRow * t.subregionCols + s.gridCol);
            subPredicted[si] = s.defective ? 1 : 0;
            const double ratio = s.epsilon / std::max(s.theta, std::numeric_limits<double>::min());
            ev.stage1Scores.push_back({ratio, t.subregionDefective[si] != 0});
            for (const cascade::PrimitiveReport& p : s.primitives) {
                const size_t pi =
                    static_cast<size_t>((s.gridRow * per + p.row) * t.PrimitiveCols() + s.gridCol * per + p.col);
                if (pi >= primPredicted.size()) {
                    throw DataError("report for '" + r.image + "' has a primitive outside the ground-truth lattice");
                }
                primPredicted[pi] = s.enteredStage2 && p.result.defective ? 1 : 0;
                ev.stage2Scores.push_back({p.result.maxDistance / p.rho, t.primitiveDefective[pi] != 0});
            }
        }
        for (size_t i = 0; i < subCount; ++i) {
            sub.Add(subPredicted[i] != 0, t.subregionDefective[i] != 0);
        }
        for (size_t i = 0; i < primPredicted.size(); ++i) {
            prim.Add(primPredicted[i] != 0, t.primitiveDefective[i] != 0);
        }
    }
    ev.image = ComputeMetrics(image, Level::Image);
    ev.subregion = ComputeMetrics(sub, Level::SubRegion);
    ev.primitive = ComputeMetrics(prim, Level::Primitive);
    return ev;
}

std::string MetricsCsvHeader() {
    return "level,total,tp,fp,tn,fn,accuracy,recall,false_alarm\n";
}

std::string MetricsToCsv(const Metrics& m) {
    auto rate = [](const std::optional<double>& v) {
        if (!v) {
            return std::string();
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", *v);
        return std::string(buf);
    };
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.6f", m.accuracy);
    const Confusion& c = m.counts;
    return std::string(ToString(m.level)) + ',' + std::to_string(c.Total()) + ',' + std::to_string(c.truePositive) +
           ',' + std::to_string(c.falsePositive) + ',' + std::to_string(c.trueNegative) + ',' +
           std::to_string(c.falseNegative) + ',' + acc + ',' + rate(m.recall) + ',' + rate(m.falseAlarm) + '\n';
}

} // namespace czi::eval
