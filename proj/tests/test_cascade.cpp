/**
 * @file test_cascade.cpp
 * @brief Binary arrays, both network stages, configuration and the end-to-end detector
 */

#include <doctest.h>

#include <czi/cascade/Detector.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>
#include <czi/synth/Fabric.h>

#include <algorithm>
#include <vector>

using namespace czi;
using namespace czi::cascade;

namespace {

BinaryArray RandomArray(Rng& rng, int rows, int cols) {
    BinaryArray a(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            a.Set(r, c, rng.Uniform01() < 0.5);
        }
    }
    return a;
}

std::vector<SiftSample> JitteredSamples(Rng& rng, PrimitiveKind kind, const std::vector<Eigen::VectorXd>& centres,
                                        int count, double jitter) {
    std::vector<SiftSample> out;
    for (int i = 0; i < count; ++i) {
        SiftSample s;
        s.kind = kind;
        for (const Eigen::VectorXd& c : centres) {
            Eigen::VectorXd d = c;
            for (Eigen::Index j = 0; j < d.size(); ++j) {
                d(j) += jitter * rng.Normal();
            }
            s.descriptors.push_back(d);
        }
        out.push_back(std::move(s));
    }
    return out;
}

bool IsPermutation(const BinaryArray& a) {
    if (a.Rows() != a.Cols()) {
        return false;
    }
    for (int i = 0; i < a.Rows(); ++i) {
        int rowSum = 0, colSum = 0;
        for (int j = 0; j < a.Cols(); ++j) {
            rowSum += a(i, j);
            colSum += a(j, i);
        }
        if (rowSum != 1 || colSum != 1) {
            return false;
        }
    }
    return true;
}

/// Shared small model trained once on defect-free renders.
const CascadeModel& SmallModel() {
    static const CascadeModel model = [] {
        synth::CorpusSpec spec;
        spec.normalCount = 60;
        spec.defectiveCount = 0;
        spec.seed = 4242;
        std::vector<imaging::GrayImage> images;
        for (const synth::CorpusItem& item : synth::GenerateCorpus(spec)) {
            images.push_back(item.sample.image);
        }
        TrainingSummary summary;
        CascadeModel m = TrainCascade(images, CascadeConfig{}, &summary);
        REQUIRE(summary.images == 60);
        REQUIRE(summary.subregions == 60 * 12);
        REQUIRE(summary.primitives == 60 * 12 * 9);
        return m;
    }();
    return model;
}

} // namespace

TEST_CASE("one-hot and row argmax round-trip") {
    const std::vector<int> idx = {3, 1, 4, 1, 5};
    const BinaryArray a = OneHot(idx, 6);
    CHECK(a.Rows() == 5);
    CHECK(a.Cols() == 6);
    CHECK(a(0, 2) == 1);
    CHECK(a(3, 0) == 1);
    CHECK(RowArgmax(a) == idx);
    CHECK_THROWS_AS(OneHot(std::vector<int>{0}, 3), ParameterError);
    CHECK_THROWS_AS(OneHot(std::vector<int>{4}, 3), ParameterError);
    CHECK(RowArgmax(BinaryArray(2, 3)) == std::vector<int>{0, 0});
}

TEST_CASE("Hamming equals a naive XOR count") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const int rows = 1 + static_cast<int>(rng.Index(6));
        const int cols = 1 + static_cast<int>(rng.Index(6));
        const BinaryArray a = RandomArray(rng, rows, cols);
        const BinaryArray b = RandomArray(rng, rows, cols);
        int naive = 0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                naive += (a(r, c) ^ b(r, c));
            }
        }
        CHECK(Hamming(a, b) == naive);
        CHECK(Hamming(a, a) == 0);
    }
    CHECK_THROWS_AS(Hamming(BinaryArray(2, 3), BinaryArray(3, 2)), ParameterError);
}

TEST_CASE("SIFT network: template, scope and index failures") {
    Rng rng(8);
    std::vector<Eigen::VectorXd> centres;
    for (int p = 0; p < 4; ++p) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
        c(p) = 1.0;
        centres.push_back(c);
    }
    const auto samples = JitteredSamples(rng, PrimitiveKind::Star1, centres, 20, 0.01);
    SiftNetParams params;
    params.seed = 77;
    const SiftModel model = TrainSift(samples, params);
    const SiftKindModel& km = model.At(PrimitiveKind::Star1);
    CHECK(IsPermutation(km.t1));
    CHECK(RowArgmax(km.t1) == km.codebook.numbering);
    CHECK(km.rho == doctest::Approx(km.trainMaxDistance * 1.1));
    CHECK_THROWS_AS(model.At(PrimitiveKind::Star2), DataError);

    for (const SiftSample& s : samples) {
        const SiftResult r = SiftStage(s.descriptors, PrimitiveKind::Star1, model);
        CHECK_FALSE(r.defective);
        CHECK(r.dif == 0);
        CHECK(r.maxDistance < km.rho);
    }

    // Two patches swap places: each lands on the other's word, two template rows differ in two bits.
    std::vector<Eigen::VectorXd> swapped = centres;
    std::swap(swapped[1], swapped[2]);
    const SiftResult idx = SiftStage(swapped, PrimitiveKind::Star1, model);
    CHECK(idx.defective);
    CHECK(idx.failure == FailureStep::Index);
    CHECK(idx.dif == 4);

    std::vector<Eigen::VectorXd> far = centres;
    far[2] = Eigen::VectorXd::Constant(6, 5.0);
    const SiftResult scope = SiftStage(far, PrimitiveKind::Star1, model);
    CHECK(scope.defective);
    CHECK(scope.failure == FailureStep::Scope);
    CHECK(scope.failurePosition == 2);
    CHECK(scope.dif == -1);

    // Different seeds renumber the words.
    bool differs = false;
    for (uint64_t seed = 1; seed < 6 && !differs; ++seed) {
        SiftNetParams other = params;
        other.seed = seed;
        differs = TrainSift(samples, other).At(PrimitiveKind::Star1).codebook.numbering != km.codebook.numbering;
    }
    CHECK(differs);
}

TEST_CASE("SIFT model JSON round trip") {
    Rng rng(9);
    std::vector<Eigen::VectorXd> centres = {Eigen::VectorXd::Ones(3), -Eigen::VectorXd::Ones(3)};
    auto samples = JitteredSamples(rng, PrimitiveKind::Star2, centres, 8, 0.05);
    const SiftModel m = TrainSift(samples, SiftNetParams{});
    const SiftModel back = SiftModelFromJson(SiftModelToJson(m), SiftNetParams{});
    CHECK(SiftModelToJson(back).dump() == SiftModelToJson(m).dump());
    nlohmann::json broken = SiftModelToJson(m);
    broken["kinds"][0]["rho"] = 0.0;
    CHECK_THROWS_AS(SiftModelFromJson(broken, SiftNetParams{}), DataError);
}

TEST_CASE("A-HOG network calibration") {
    Rng rng(5);
    const AhogKey key{63, 49, SubRegionKind::Subregion2};
    std::vector<AhogSample> samples;
    for (int i = 0; i < 12; ++i) {
        AhogSample s;
        s.key = key;
        s.descriptor = Eigen::VectorXd::Constant(8, 0.3);
        for (int j = 0; j < 8; ++j) {
            s.descriptor(j) += 0.01 * rng.Normal();
        }
        samples.push_back(s);
    }
    AhogParams params;
    const AhogModel model = TrainAhog(samples, params);
    const AhogEntry& e = model.At(key);
    CHECK(e.samples == 12);
    CHECK(e.codebook.Size() == 5);
    CHECK(e.theta == doctest::Approx(e.trainExtreme * 1.1));
    for (const AhogSample& s : samples) {
        const AhogResult r = AhogStage(key, s.descriptor, model);
        CHECK(r.epsilon <= e.trainExtreme);
        CHECK_FALSE(r.defective);
    }
    CHECK(AhogStage(key, Eigen::VectorXd::Constant(8, 1.0), model).defective);
    CHECK_THROWS_AS(model.At({62, 48, SubRegionKind::Subregion1}), DataError);

    // Identical samples give a zero threshold, and only a strict exceedance flags.
    std::vector<AhogSample> same(6, samples.front());
    const AhogModel flat = TrainAhog(same, params);
    CHECK(flat.At(key).theta == 0.0);
    CHECK_FALSE(AhogStage(key, samples.front().descriptor, flat).defective);
    CHECK(ExceedsThreshold(0.2, 0.1, coding::LcreMode::WeightedDistance));
    CHECK(ExceedsThreshold(0.05, 0.1, coding::LcreMode::Eq9Literal));

    std::vector<AhogSample> few(samples.begin(), samples.begin() + 3);
    CHECK_THROWS_AS(TrainAhog(few, params), ParameterError);

    const AhogModel back = AhogModelFromJson(AhogModelToJson(model), params);
    CHECK(AhogModelToJson(back).dump() == AhogModelToJson(model).dump());
}

TEST_CASE("configuration JSON") {
    CascadeConfig cfg;
    cfg.ApplySeed(9);
    cfg.ahog.margin = 0.2;
    cfg.ahog.mode = coding::LcreMode::Eq9Literal;
    const CascadeConfig back = ConfigFromJson(ConfigToJson(cfg));
    CHECK(ConfigToJson(back) == ConfigToJson(cfg));
    CHECK(ConfigHash(back) == ConfigHash(cfg));
    CHECK(ConfigHash(cfg) != ConfigHash(CascadeConfig{}));

    CascadeConfig threaded = cfg;
    threaded.threads = 4;
    CHECK(ConfigHash(threaded) == ConfigHash(cfg));

    CHECK_THROWS_AS(ConfigFromJson(nlohmann::json{{"ahog", {{"wordz", 5}}}}), ParameterError);
    CHECK_THROWS_AS(ConfigFromJson(nlohmann::json{{"ahog", {{"margin", 1.5}}}}), ParameterError);
    CHECK_THROWS_AS(ConfigFromJson(nlohmann::json{{"ahog", {{"lcre_mode", "other"}}}}), ParameterError);
    CHECK(ConfigFromJson(nlohmann::json{{"seed", 3}}).ahog.seed != CascadeConfig{}.ahog.seed);
}

TEST_CASE("detector on rendered fabric") {
    const CascadeModel& model = SmallModel();

    synth::FabricSpec fs;
    fs.seed = 99;
    fs.layoutPhase = 5;
    const synth::FabricSample clean = synth::GenerateFabric(fs);
    const DetectionReport normal = DetectImage(clean.image, model);
    CHECK_FALSE(normal.defective);
    CHECK(normal.subregions.size() == 12);
    CHECK(normal.timings.stage1Ms > 0.0);
    for (const SubRegionReport& r : normal.subregions) {
        CHECK(r.primitives.empty() == !r.enteredStage2);
    }

    const synth::FabricSample holed = synth::InjectDefect(clean, synth::DefaultDefect(synth::DefectKind::Hole, 4, 7));
    const DetectionReport bad = DetectImage(holed.image, model);
    REQUIRE(bad.defective);
    int flagged = 0;
    for (const SubRegionReport& r : bad.subregions) {
        for (const PrimitiveReport& p : r.primitives) {
            if (p.result.defective) {
                ++flagged;
                CHECK(r.gridRow * 3 + p.row == 4);
                CHECK(r.gridCol * 3 + p.col == 7);
            }
        }
    }
    CHECK(flagged == 1);

    DetectOptions exhaustive;
    exhaustive.exhaustiveStage2 = true;
    const DetectionReport full = DetectImage(clean.image, model, exhaustive);
    CHECK(full.defective == normal.defective);
    for (const SubRegionReport& r : full.subregions) {
        CHECK(r.primitives.size() == 9);
    }

    DetectOptions parallel;
    parallel.threads = 3;
    CHECK(ReportToJson(DetectImage(holed.image, model, parallel), false) == ReportToJson(bad, false));
}

TEST_CASE("report and model serialization") {
    const CascadeModel& model = SmallModel();
    synth::FabricSpec fs;
    fs.seed = 7;
    fs.layoutPhase = 2;
    const auto sample =
        synth::InjectDefect(synth::GenerateFabric(fs), synth::DefaultDefect(synth::DefectKind::BrokenEnd, 2, 2));
    DetectionReport report = DetectImage(sample.image, model);
    report.image = "broken.png";

    const nlohmann::json j = ReportToJson(report, true);
    CHECK(j.contains("timings_ms"));
    CHECK_FALSE(ReportToJson(report, false).contains("timings_ms"));
    CHECK(ReportToJson(ReportFromJson(j), true) == j);
    CHECK_THROWS_AS(ReportFromJson(nlohmann::json{{"format", "x"}}), DataError);

    const std::string csv = ReportToCsv(report);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 12);
    CHECK(csv.rfind("broken.png,subregion,", 0) == 0);
    const std::string header = ReportCsvHeader();
    const std::string firstLine = csv.substr(0, csv.find('\n'));
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(firstLine.begin(), firstLine.end(), ','));

    const nlohmann::json bundle = ModelToJson(model);
    const CascadeModel back = ModelFromJson(bundle);
    CHECK(ModelToJson(back) == bundle);
    CHECK(ReportToJson(DetectImage(sample.image, back), false) == ReportToJson(DetectImage(sample.image, model), false));

    nlohmann::json tampered = bundle;
    tampered["config"]["ahog"]["margin"] = 0.3;
    CHECK_THROWS_AS(ModelFromJson(tampered), DataError);
    nlohmann::json wrongVersion = bundle;
    wrongVersion["version"] = 99;
    CHECK_THROWS_AS(ModelFromJson(wrongVersion), DataError);
    CHECK_THROWS_AS(LoadModel("/nonexistent/model.json"), DataError);
}

TEST_CASE("training rejects an empty corpus") {
    std::vector<imaging::GrayImage> none;
    CHECK_THROWS_AS(TrainCascade(none, CascadeConfig{}, nullptr), ParameterError);
}

TEST_CASE("one-hot of the template display example") {
    const BinaryArray t = OneHot(std::vector<int>{1, 3, 2}, 3);
    const int expected[3][3] = {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            CHECK(t(r, c) == expected[r][c]);
        }
    }
    const BinaryArray same = OneHot(std::vector<int>{1, 1, 1}, 3);
    for (int r = 1; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            CHECK(same(r, c) == same(0, c));
        }
    }
}

TEST_CASE("stage scores on paired renders") {
    const CascadeModel& model = SmallModel();
    DetectOptions exhaustive;
    exhaustive.exhaustiveStage2 = true;
    int pairs = 0;
    for (int phase = 0; phase < 12; phase += 3) {
        synth::FabricSpec fs;
        fs.seed = 500 + static_cast<uint64_t>(phase);
        fs.layoutPhase = phase;
        const synth::FabricSample clean = synth::GenerateFabric(fs);
        const synth::FabricSample bar =
            synth::InjectDefect(clean, synth::DefaultDefect(synth::DefectKind::ThickBar, 1 + phase / 3 * 2, 0));
        const DetectionReport a = DetectImage(clean.image, model, exhaustive);
        const DetectionReport b = DetectImage(bar.image, model, exhaustive);
        REQUIRE(a.subregions.size() == b.subregions.size());
        for (size_t i = 0; i < a.subregions.size(); ++i) {
            const auto& sa = a.subregions[i];
            const auto& sb = b.subregions[i];
            if (bar.truth.subregionDefective[static_cast<size_t>(sb.gridRow * 3 + sb.gridCol)]) {
                CHECK(sb.epsilon > sa.epsilon);
                ++pairs;
            }
        }
        // Every held-out clean primitive stays inside the scope radius.
        for (const SubRegionReport& s : a.subregions) {
            for (const PrimitiveReport& p : s.primitives) {
                CHECK(p.result.failure != FailureStep::Scope);
            }
        }
    }
    CHECK(pairs >= 4 * 3);
}

TEST_CASE("threshold separates held-out normals from holes") {
    const CascadeModel& model = SmallModel();
    synth::CorpusSpec spec;
    spec.normalCount = 12;
    spec.defectiveCount = 0;
    spec.seed = 31337;
    long normals = 0, below = 0, holes = 0, above = 0;
    for (const synth::CorpusItem& item : synth::GenerateCorpus(spec)) {
        for (const SubRegionReport& s : DetectImage(item.sample.image, model).subregions) {
            ++normals;
            below += s.epsilon <= s.theta ? 1 : 0;
        }
        const auto holed =
            synth::InjectDefect(item.sample, synth::DefaultDefect(synth::DefectKind::Hole, 4, static_cast<int>(normals % 9)));
        for (const SubRegionReport& s : DetectImage(holed.image, model).subregions) {
            if (holed.truth.subregionDefective[static_cast<size_t>(s.gridRow * 3 + s.gridCol)]) {
                ++holes;
                above += s.epsilon > s.theta ? 1 : 0;
            }
        }
    }
    CHECK(static_cast<double>(below) / static_cast<double>(normals) >= 0.95);
    CHECK(static_cast<double>(above) / static_cast<double>(holes) >= 0.95);
}

TEST_CASE("cascade invariants") {
    const CascadeModel& model = SmallModel();
    synth::FabricSpec fs;
    fs.seed = 1234;
    fs.layoutPhase = 7;
    const synth::FabricSample clean = synth::GenerateFabric(fs);

    const DetectionReport fast = DetectImage(clean.image, model);
    bool allPass = true;
    for (const SubRegionReport& s : fast.subregions) {
        allPass = allPass && !s.stage1Defective;
    }
    REQUIRE(allPass);
    CHECK(fast.timings.stage2Ms == 0.0);
    for (const SubRegionReport& s : fast.subregions) {
        CHECK(s.primitives.empty());
    }

    // With every threshold forced to zero each sub-region is flagged; clean primitives downgrade them all.
    CascadeModel strict = model;
    for (auto& [key, entry] : strict.ahog.entries) {
        entry.theta = 0.0;
    }
    const DetectionReport downgraded = DetectImage(clean.image, strict);
    CHECK_FALSE(downgraded.defective);
    for (const SubRegionReport& s : downgraded.subregions) {
        CHECK(s.stage1Defective);
        CHECK(s.enteredStage2);
        CHECK(s.primitives.size() == 9);
        CHECK_FALSE(s.defective);
        for (const PrimitiveReport& p : s.primitives) {
            CHECK(p.result.dif == 0);
            CHECK(p.result.indexes == RowArgmax(model.sift.At(p.kind).t1));
        }
    }

    // Adding a second defect never clears a defective verdict.
    for (synth::DefectKind first : synth::kAllDefectKinds) {
        const auto once = synth::InjectDefect(clean, synth::DefaultDefect(first, 2, 1));
        const auto twice = synth::InjectDefect(once, synth::DefaultDefect(synth::DefectKind::Hole, 9, 6));
        const bool a = DetectImage(once.image, model).defective;
        const bool b = DetectImage(twice.image, model).defective;
        CHECK((!a || b));
        CHECK(b);
    }
}
