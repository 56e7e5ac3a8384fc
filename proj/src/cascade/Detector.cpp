/**
 * @file Detector.cpp
 */

#include <czi/cascade/Detector.h>
#include <czi/core/Error.h>
#include <czi/core/Parallel.h>
#include <czi/features/Hog.h>
#include <czi/features/Sift.h>
#include <czi/imaging/Filter.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace czi::cascade {

using nlohmann::json;
using segment::Primitive;
using segment::SubRegion;

namespace {

constexpr const char* kModelFormat = "czi-model";
constexpr int kModelVersion = 1;
constexpr const char* kReportFormat = "czi-report";
constexpr int kReportVersion = 1;

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<Eigen::VectorXd> SiftValues(const Primitive& p, const features::SiftParams& params) {
    std::vector<Eigen::VectorXd> out;
    for (features::Descriptor& d : features::DenseSift(p, params)) {
        out.push_back(std::move(d.values));
    }
    return out;
}

json RectToJson(const Rect& r) {
    return json::array({r.x, r.y, r.width, r.height});
}

Rect RectFromJson(const json& j) {
    const auto v = j.get<std::vector<int>>();
    if (v.size() != 4) {
        throw DataError("rectangle must have four entries");
    }
    return {v[0], v[1], v[2], v[3]};
}

SubRegionKind ParseSubRegionKind(const std::string& s) {
    if (s == "subregion1") {
        return SubRegionKind::Subregion1;
    }
    if (s == "subregion2") {
        return SubRegionKind::Subregion2;
    }
    throw DataError("unknown sub-region kind '" + s + "'");
}

PrimitiveKind ParsePrimitiveKind(const std::string& s) {
    if (s == "star1") {
        return PrimitiveKind::Star1;
    }
    if (s == "star2") {
        return PrimitiveKind::Star2;
    }
    throw DataError("unknown primitive kind '" + s + "'");
}

FailureStep ParseFailure(const std::string& s) {
    for (FailureStep f : {FailureStep::None, FailureStep::Scope, FailureStep::Index, FailureStep::Distance}) {
        if (s == ToString(f)) {
            return f;
        }
    }
    throw DataError("unknown failure step '" + s + "'");
}

std::string Num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Segmented and labelled sub-region with its primitives.
struct ParsedSubRegion {
    SubRegion sr;
    std::vector<Primitive> primitives;
    segment::SubregionReading reading;
};

} // namespace

CascadeModel TrainCascade(std::span<const imaging::GrayImage> normals, const CascadeConfig& cfg,
                          TrainingSummary* summary) {
    ValidateConfig(cfg);
    if (normals.empty()) {
        throw ParameterError("training needs at least one defect-free image");
    }
    std::vector<std::vector<ParsedSubRegion>> parsed(normals.size());
    ParallelFor(normals.size(), cfg.threads, [&](size_t i) {
        const imaging::GrayImage smoothed = imaging::GaussianSmooth(normals[i], cfg.segmentation.smoothing);
        for (SubRegion& sr : segment::SegmentRule1(smoothed, cfg.segmentation)) {
            ParsedSubRegion ps;
            ps.primitives = segment::SegmentRule2(sr, cfg.segmentation);
            ps.sr = std::move(sr);
            parsed[i].push_back(std::move(ps));
        }
    });

    std::vector<Primitive> all;
    for (const auto& image : parsed) {
        for (const ParsedSubRegion& ps : image) {
            all.insert(all.end(), ps.primitives.begin(), ps.primitives.end());
        }
    }
    CascadeModel model;
    model.config = cfg;
    model.classifier = segment::CalibrateClassifier(all);

    std::vector<AhogSample> ahogSamples;
    std::vector<SiftSample> siftSamples;
    for (size_t i = 0; i < parsed.size(); ++i) {
        for (ParsedSubRegion& ps : parsed[i]) {
            const SubRegionKind kind =
                segment::ClassifySubregion(ps.primitives, model.classifier, cfg.segmentation.primitivesPerSide);
            AhogSample a;
            a.key = {ps.sr.sizeClass.lh, ps.sr.sizeClass.lv, kind};
            a.descriptor = features::Ahog(ps.sr.pixels, cfg.hog).values;
            ahogSamples.push_back(std::move(a));
            for (const Primitive& p : ps.primitives) {
                SiftSample s;
                s.kind = RowMotif(kind, p.row);
                s.descriptors = SiftValues(p, cfg.sift);
                siftSamples.push_back(std::move(s));
            }
        }
    }
    model.ahog = TrainAhog(ahogSamples, cfg.ahog);
    model.sift = TrainSift(siftSamples, cfg.siftNet);
    if (summary) {
        summary->images = static_cast<int>(normals.size());
        summary->subregions = static_cast<int>(ahogSamples.size());
        summary->primitives = static_cast<int>(siftSamples.size());
    }
    return model;
}

DetectionReport DetectImage(const imaging::GrayImage& img, const CascadeModel& model, const DetectOptions& options) {
    const CascadeConfig& cfg = model.config;
    const auto t0 = Clock::now();
    DetectionReport report;

    const imaging::GrayImage smoothed = imaging::GaussianSmooth(img, cfg.segmentation.smoothing);
    std::vector<SubRegion> srs = segment::SegmentRule1(smoothed, cfg.segmentation);
    std::vector<ParsedSubRegion> parsed(srs.size());
    report.subregions.resize(srs.size());

    ParallelFor(srs.size(), options.threads, [&](size_t i) {
        ParsedSubRegion& ps = parsed[i];
        ps.sr = std::move(srs[i]);
        ps.primitives = segment::SegmentRule2(ps.sr, cfg.segmentation);
        ps.reading = segment::ReadSubregion(ps.primitives, model.classifier, cfg.segmentation.primitivesPerSide);

        SubRegionReport& r = report.subregions[i];
        r.bounds = ps.sr.bounds;
        r.gridRow = ps.sr.gridRow;
        r.gridCol = ps.sr.gridCol;
        r.sizeClass = ps.sr.sizeClass;
        r.kind = ps.reading.kind;
        r.rowOrderAnomaly = !ps.reading.Consistent();
        const AhogKey key{r.sizeClass.lh, r.sizeClass.lv, r.kind};
        const AhogResult a = AhogStage(key, features::Ahog(ps.sr.pixels, cfg.hog).values, model.ahog);
        r.epsilon = a.epsilon;
        r.theta = a.theta;
        r.stage1Defective = a.defective || r.rowOrderAnomaly;
        r.defective = r.stage1Defective;
    });
    report.timings.stage1Ms = MsSince(t0);

    std::vector<size_t> stage2;
    for (size_t i = 0; i < report.subregions.size(); ++i) {
        if (report.subregions[i].stage1Defective || options.exhaustiveStage2) {
            stage2.push_back(i);
        }
    }
    if (!stage2.empty()) {
        const auto t1 = Clock::now();
        ParallelFor(stage2.size(), options.threads, [&](size_t s) {
            const size_t i = stage2[s];
            SubRegionReport& r = report.subregions[i];
            bool anyDefective = false;
            for (const Primitive& p : parsed[i].primitives) {
                PrimitiveReport pr;
                pr.bounds = p.bounds;
                pr.row = p.row;
                pr.col = p.col;
                pr.kind = RowMotif(r.kind, p.row);
                pr.rho = model.sift.At(pr.kind).rho;
                pr.result = SiftStage(SiftValues(p, cfg.sift), pr.kind, model.sift);
                anyDefective = anyDefective || pr.result.defective;
                r.primitives.push_back(std::move(pr));
            }
            if (r.stage1Defective) {
                r.enteredStage2 = true;
                r.defective = anyDefective;
            }
        });
        report.timings.stage2Ms = MsSince(t1);
    }
    for (const SubRegionReport& r : report.subregions) {
        report.defective = report.defective || r.defective;
    }
    report.timings.totalMs = MsSince(t0);
    return report;
}

json ReportToJson(const DetectionReport& report, bool includeTimings) {
    json subs = json::array();
    for (const SubRegionReport& r : report.subregions) {
        json prims = json::array();
        for (const PrimitiveReport& p : r.primitives) {
            prims.push_back({{"row", p.row},
                             {"col", p.col},
                             {"bounds", RectToJson(p.bounds)},
                             {"kind", std::string(ToString(p.kind))},
                             {"defective", p.result.defective},
                             {"failure", ToString(p.result.failure)},
                             {"failure_position", p.result.failurePosition},
                             {"dif", p.result.dif},
                             {"max_distance", p.result.maxDistance},
                             {"rho", p.rho},
                             {"indexes", p.result.indexes}});
        }
        const auto& sc = r.sizeClass;
        subs.push_back({{"grid_row", r.gridRow},
                        {"grid_col", r.gridCol},
                        {"bounds", RectToJson(r.bounds)},
                        {"size_class", {{"lh", sc.lh}, {"lv", sc.lv}, {"h1", sc.h1}, {"h2", sc.h2}, {"v1", sc.v1}, {"v2", sc.v2}}},
                        {"kind", std::string(ToString(r.kind))},
                        {"row_order_anomaly", r.rowOrderAnomaly},
                        {"epsilon", r.epsilon},
                        {"theta", r.theta},
                        {"stage1_defective", r.stage1Defective},
                        {"entered_stage2", r.enteredStage2},
                        {"defective", r.defective},
                        {"primitives", prims}});
    }
    json j = {{"format", kReportFormat},
              {"version", kReportVersion},
              {"image", report.image},
              {"defective", report.defective},
              {"subregions", subs}};
    if (!report.error.empty()) {
        j["error"] = report.error;
    }
    if (includeTimings) {
        j["timings_ms"] = {{"stage1", report.timings.stage1Ms},
                           {"stage2", report.timings.stage2Ms},
                           {"total", report.timings.totalMs}};
    }
    return j;
}

DetectionReport ReportFromJson(const json& j) {
    try {
        if (j.at("format").get<std::string>() != kReportFormat || j.at("version").get<int>() != kReportVersion) {
            throw DataError("not a version " + std::to_string(kReportVersion) + " detection report");
        }
        DetectionReport report;
        report.image = j.at("image").get<std::string>();
        report.defective = j.at("defective").get<bool>();
        report.error = j.value("error", std::string());
        if (j.contains("timings_ms")) {
            const json& t = j.at("timings_ms");
            report.timings = {t.at("stage1").get<double>(), t.at("stage2").get<double>(), t.at("total").get<double>()};
        }
        for (const json& s : j.at("subregions")) {
            SubRegionReport r;
            r.gridRow = s.at("grid_row").get<int>();
            r.gridCol = s.at("grid_col").get<int>();
            r.bounds = RectFromJson(s.at("bounds"));
            const json& sc = s.at("size_class");
            r.sizeClass = {sc.at("lh").get<int>(), sc.at("lv").get<int>(), sc.at("h1").get<int>(),
                           sc.at("h2").get<int>(), sc.at("v1").get<int>(), sc.at("v2").get<int>()};
            r.kind = ParseSubRegionKind(s.at("kind").get<std::string>());
            r.rowOrderAnomaly = s.at("row_order_anomaly").get<bool>();
            r.epsilon = s.at("epsilon").get<double>();
            r.theta = s.at("theta").get<double>();
            r.stage1Defective = s.at("stage1_defective").get<bool>();
            r.enteredStage2 = s.at("entered_stage2").get<bool>();
            r.defective = s.at("defective").get<bool>();
            for (const json& p : s.at("primitives")) {
                PrimitiveReport pr;
                pr.row = p.at("row").get<int>();
                pr.col = p.at("col").get<int>();
                pr.bounds = RectFromJson(p.at("bounds"));
                pr.kind = ParsePrimitiveKind(p.at("kind").get<std::string>());
                pr.rho = p.at("rho").get<double>();
                pr.result.defective = p.at("defective").get<bool>();
                pr.result.failure = ParseFailure(p.at("failure").get<std::string>());
                pr.result.failurePosition = p.at("failure_position").get<int>();
                pr.result.dif = p.at("dif").get<int>();
                pr.result.maxDistance = p.at("max_distance").get<double>();
                pr.result.indexes = p.at("indexes").get<std::vector<int>>();
                r.primitives.push_back(std::move(pr));
            }
            report.subregions.push_back(std::move(r));
        }
        return report;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed detection report: ") + e.what());
    }
}

std::string ReportCsvHeader() {
    return "image,level,grid_row,grid_col,row,col,x,y,width,height,kind,score,threshold,stage1_defective,defective,"
           "failure\n";
}

std::string ReportToCsv(const DetectionReport& report) {
    std::ostringstream out;
    for (const SubRegionReport& r : report.subregions) {
        out << report.image << ",subregion," << r.gridRow << ',' << r.gridCol << ",,," << r.bounds.x << ','
            << r.bounds.y << ',' << r.bounds.width << ',' << r.bounds.height << ',' << ToString(r.kind) << ','
            << Num(r.epsilon) << ',' << Num(r.theta) << ',' << r.stage1Defective << ',' << r.defective << ','
            << (r.rowOrderAnomaly ? "row-order" : "") << '\n';
        for (const PrimitiveReport& p : r.primitives) {
            out << report.image << ",primitive," << r.gridRow << ',' << r.gridCol << ',' << p.row << ',' << p.col
                << ',' << p.bounds.x << ',' << p.bounds.y << ',' << p.bounds.width << ',' << p.bounds.height << ','
                << ToString(p.kind) << ',' << Num(p.result.maxDistance) << ',' << Num(p.rho) << ",,"
                << p.result.defective << ',' << ToString(p.result.failure) << '\n';
        }
    }
    return out.str();
}

json ModelToJson(const CascadeModel& model) {
    json config = ConfigToJson(model.config);
    config.erase("threads");
    return {{"format", kModelFormat},
            {"version", kModelVersion},
            {"config", config},
            {"config_hash", ConfigHash(model.config)},
            {"classifier",
             {{"midpoint", model.classifier.midpoint},
              {"star1_mean", model.classifier.star1Mean},
              {"star2_mean", model.classifier.star2Mean}}},
            {"ahog", AhogModelToJson(model.ahog)},
            {"sift", SiftModelToJson(model.sift)}};
}

CascadeModel ModelFromJson(const json& j) {
    try {
        if (j.at("format").get<std::string>() != kModelFormat) {
            throw DataError("not a model bundle");
        }
        if (j.at("version").get<int>() != kModelVersion) {
            throw DataError("unsupported model bundle version " + std::to_string(j.at("version").get<int>()));
        }
        CascadeModel model;
        try {
            model.config = ConfigFromJson(j.at("config"));
        } catch (const ParameterError& e) {
            throw DataError(std::string("model bundle carries an invalid config: ") + e.what());
        }
        if (ConfigHash(model.config) != j.at("config_hash").get<std::string>()) {
            throw DataError("model bundle config hash does not match its config");
        }
        const json& c = j.at("classifier");
        model.classifier = {c.at("midpoint").get<double>(), c.at("star1_mean").get<double>(),
                            c.at("star2_mean").get<double>()};
        model.ahog = AhogModelFromJson(j.at("ahog"), model.config.ahog);
        model.sift = SiftModelFromJson(j.at("sift"), model.config.siftNet);
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model bundle: ") + e.what());
    }
}

void SaveModel(const CascadeModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write model bundle " + path.string());
    }
    out << ModelToJson(model).dump(1) << '\n';
    if (!out) {
        throw DataError("failed writing model bundle " + path.string());
    }
}

CascadeModel LoadModel(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open model bundle " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("model bundle " + path.string() + " is not valid JSON: " + e.what());
    }
    return ModelFromJson(j);
}

} // namespace czi::cascade
