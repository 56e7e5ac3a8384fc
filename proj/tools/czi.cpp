/**
 * @file czi.cpp
 * @brief Command-line front end: generate, train, detect, eval, bench-boi
 *
 * Exit codes: 0 success, 1 usage error, 2 data or model error.
 */

#include <czi/cascade/Detector.h>
#include <czi/core/Error.h>
#include <czi/eval/Bof.h>
#include <czi/eval/Metrics.h>
#include <czi/eval/Roc.h>
#include <czi/imaging/ImageIO.h>
#include <czi/segment/Segmentation.h>
#include <czi/synth/Fabric.h>
#include <czi/synth/Manifest.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace czi;

namespace {

struct GlobalOptions {
    std::string configPath;
    std::optional<uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> lcreMode;
};

cascade::CascadeConfig ResolveConfig(const GlobalOptions& g) {
    cascade::CascadeConfig cfg;
    if (!g.configPath.empty()) {
        cfg = cascade::LoadConfig(g.configPath, cfg);
    }
    if (g.seed) {
        cfg.seed = *g.seed;
        cfg.ApplySeed(*g.seed);
    }
    if (g.threads) {
        cfg.threads = *g.threads;
    }
    if (g.lcreMode) {
        cfg.ahog.mode = coding::ParseLcreMode(*g.lcreMode);
    }
    cascade::ValidateConfig(cfg);
    return cfg;
}

void WriteText(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
}

std::string ReportFileName(const std::string& image) {
    return fs::path(image).stem().string() + ".report.json";
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    std::string out;
    int normal = 25;
    int defective = 25;
};

int RunGenerate(const GlobalOptions& g, const GenerateOptions& o) {
    synth::CorpusSpec spec;
    spec.normalCount = o.normal;
    spec.defectiveCount = o.defective;
    spec.seed = g.seed.value_or(1);
    const std::vector<synth::CorpusItem> items = synth::GenerateCorpus(spec);

    fs::create_directories(o.out);
    synth::Manifest manifest;
    manifest.baseDir = o.out;
    for (const synth::CorpusItem& item : items) {
        const std::string file = item.name + ".png";
        imaging::WritePng(item.sample.image, fs::path(o.out) / file);
        manifest.entries.push_back(synth::MakeEntry(file, item.sample.truth));
    }
    synth::WriteManifest(manifest, fs::path(o.out) / "manifest.json");
    std::cerr << "wrote " << items.size() << " images and manifest.json to " << o.out << '\n';
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
    std::string manifest;
    std::string out;
};

int RunTrain(const GlobalOptions& g, const TrainOptions& o) {
    const cascade::CascadeConfig cfg = ResolveConfig(g);
    const synth::Manifest manifest = synth::ReadManifest(o.manifest);
    std::vector<imaging::GrayImage> normals;
    int skipped = 0;
    for (const synth::ManifestEntry& e : manifest.entries) {
        if (e.defective) {
            ++skipped;
            continue;
        }
        normals.push_back(imaging::LoadImage(manifest.ImagePath(e)));
    }
    if (normals.empty()) {
        throw DataError("manifest " + o.manifest + " lists no defect-free images to train on");
    }
    cascade::TrainingSummary summary;
    const cascade::CascadeModel model = cascade::TrainCascade(normals, cfg, &summary);
    cascade::SaveModel(model, o.out);
    std::cerr << "trained on " << summary.images << " images (" << summary.subregions << " sub-regions, "
              << summary.primitives << " primitives); skipped " << skipped << " defective; "
              << model.ahog.entries.size() << " A-HOG dictionaries; wrote " << o.out << '\n';
    return 0;
}

// ---------------------------------------------------------------- detect

struct DetectOptionsCli {
    std::string model;
    std::string manifest;
    std::vector<std::string> images;
    std::string out;
    bool overlay = false;
    bool timings = false;
    bool exhaustive = false;
};

imaging::GrayImage RenderOverlay(const imaging::GrayImage& img, const cascade::DetectionReport& r) {
    std::vector<segment::SubRegion> flagged;
    std::vector<segment::Primitive> failed;
    for (const cascade::SubRegionReport& s : r.subregions) {
        if (s.stage1Defective) {
            segment::SubRegion sr;
            sr.bounds = s.bounds;
            flagged.push_back(std::move(sr));
        }
        for (const cascade::PrimitiveReport& p : s.primitives) {
            if (s.enteredStage2 && p.result.defective) {
                segment::Primitive pr;
                pr.bounds = p.bounds;
                failed.push_back(std::move(pr));
            }
        }
    }
    return segment::DrawOverlay(img, flagged, failed);
}

int RunDetect(const GlobalOptions& g, const DetectOptionsCli& o) {
    if (o.manifest.empty() == o.images.empty()) {
        throw ParameterError("detect needs either --manifest or image paths, not both");
    }
    if (!g.configPath.empty() || g.seed || g.lcreMode) {
        std::cerr << "note: detection uses the configuration stored in the model; --config, --seed and "
                     "--lcre-mode are ignored\n";
    }
    const cascade::CascadeModel model = cascade::LoadModel(o.model);
    cascade::DetectOptions options;
    options.exhaustiveStage2 = o.exhaustive;
    options.threads = g.threads.value_or(model.config.threads);
    if (options.threads < 1) {
        throw ParameterError("threads must be at least 1");
    }

    std::vector<std::pair<std::string, fs::path>> inputs; // report name, file
    if (!o.manifest.empty()) {
        const synth::Manifest manifest = synth::ReadManifest(o.manifest);
        for (const synth::ManifestEntry& e : manifest.entries) {
            inputs.emplace_back(e.image, manifest.ImagePath(e));
        }
    } else {
        for (const std::string& p : o.images) {
            inputs.emplace_back(fs::path(p).filename().string(), p);
        }
    }

    fs::create_directories(o.out);
    std::string csv = cascade::ReportCsvHeader();
    int defective = 0, failures = 0;
    for (const auto& [name, path] : inputs) {
        const imaging::GrayImage img = imaging::LoadImage(path);
        cascade::DetectionReport report;
        try {
            report = cascade::DetectImage(img, model, options);
        } catch (const SegmentationError& e) {
            // An image whose lattice cannot be found is not a normal fabric.
            report = {};
            report.defective = true;
            report.error = e.what();
            ++failures;
        }
        report.image = name;
        defective += report.defective ? 1 : 0;
        WriteText(fs::path(o.out) / ReportFileName(name), cascade::ReportToJson(report, o.timings).dump(1) + "\n");
        csv += cascade::ReportToCsv(report);
        if (o.overlay) {
            imaging::WritePng(RenderOverlay(img, report),
                              fs::path(o.out) / (fs::path(name).stem().string() + ".overlay.png"));
        }
    }
    WriteText(fs::path(o.out) / "reports.csv", csv);
    std::cout << inputs.size() << " images, " << defective << " defective";
    if (failures > 0) {
        std::cout << " (" << failures << " could not be segmented)";
    }
    std::cout << '\n';
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string manifest;
    std::string reports;
    std::string out;
};

int RunEval(const GlobalOptions& g, const EvalOptions& o) {
    const synth::Manifest manifest = synth::ReadManifest(o.manifest);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.reports)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.ends_with(".report.json")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<cascade::DetectionReport> reports;
    for (const fs::path& f : files) {
        std::ifstream in(f);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("report " + f.string() + " is not valid JSON: " + e.what());
        }
        reports.push_back(cascade::ReportFromJson(j));
    }
    const coding::LcreMode mode = g.lcreMode ? coding::ParseLcreMode(*g.lcreMode) : coding::LcreMode::WeightedDistance;
    const eval::Evaluation ev = eval::ScoreReports(reports, manifest.entries, mode);

    std::string metrics = eval::MetricsCsvHeader();
    for (const eval::Metrics* m : {&ev.image, &ev.subregion, &ev.primitive}) {
        metrics += eval::MetricsToCsv(*m);
    }
    std::string roc = eval::RocCsvHeader();
    auto addRoc = [&](const std::vector<eval::ScoredLabel>& scores, bool higher, const std::string& stage) {
        try {
            const eval::RocCurve curve = eval::Roc(scores, higher);
            roc += eval::RocToCsv(curve, stage);
            std::cout << stage << " AUC " << curve.auc << " over " << scores.size() << " units\n";
        } catch (const DataError& e) {
            std::cout << stage << " ROC skipped: " << e.what() << '\n';
        }
    };
    addRoc(ev.stage1Scores, ev.stage1HigherIsDefective, "ahog");
    addRoc(ev.stage2Scores, true, "sift");

    if (!o.out.empty()) {
        fs::create_directories(o.out);
        WriteText(fs::path(o.out) / "metrics.csv", metrics);
        WriteText(fs::path(o.out) / "roc.csv", roc);
    }
    std::cout << metrics;
    return 0;
}

// ---------------------------------------------------------------- bench-boi

struct BenchOptions {
    std::string out;
    int seeds = 1;
    eval::BenchSpec spec;
};

int RunBench(const GlobalOptions& g, const BenchOptions& o) {
    if (o.seeds < 1) {
        throw ParameterError("--seeds must be at least 1");
    }
    const uint64_t first = g.seed.value_or(1);
    std::string csv = eval::BenchCsvHeader();
    for (int s = 0; s < o.seeds; ++s) {
        const auto rows = eval::BoiVsBofBench(o.spec, first + static_cast<uint64_t>(s));
        csv += eval::BenchToCsv(rows, first + static_cast<uint64_t>(s));
    }
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        WriteText(o.out, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage defect detection for periodic patterned textures"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.configPath, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--lcre-mode", g.lcreMode, "Reconstruction-error mode")
        ->check(CLI::IsMember({"weighted-distance", "eq9-literal"}));

    GenerateOptions gen;
    CLI::App* generate = app.add_subcommand("generate", "Render a synthetic corpus and its manifest");
    generate->add_option("--out", gen.out, "Output directory")->required();
    generate->add_option("--normal", gen.normal, "Defect-free images")->check(CLI::NonNegativeNumber);
    generate->add_option("--defective", gen.defective, "Defective images")->check(CLI::NonNegativeNumber);

    TrainOptions tr;
    CLI::App* train = app.add_subcommand("train", "Train a model bundle from the defect-free images of a manifest");
    train->add_option("--manifest", tr.manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
    train->add_option("--out", tr.out, "Model bundle path")->required();

    DetectOptionsCli det;
    CLI::App* detect = app.add_subcommand("detect", "Run the detector and write one report per image");
    detect->add_option("--model", det.model, "Model bundle")->required()->check(CLI::ExistingFile);
    detect->add_option("--manifest", det.manifest, "Detect every image of a manifest")->check(CLI::ExistingFile);
    detect->add_option("images", det.images, "Image files (PNG or PGM)")->check(CLI::ExistingFile);
    detect->add_option("--out", det.out, "Report directory")->required();
    detect->add_flag("--overlay", det.overlay, "Also write overlay PNGs marking flagged regions");
    detect->add_flag("--timings", det.timings, "Include per-stage wall times in the JSON reports");
    detect->add_flag("--exhaustive", det.exhaustive,
                     "Score every primitive with the second stage (verdicts unchanged; for ROC evaluation)");

    EvalOptions ev;
    CLI::App* evalCmd = app.add_subcommand("eval", "Score reports against a manifest; write metrics and ROC points");
    evalCmd->add_option("--manifest", ev.manifest, "Ground-truth manifest")->required()->check(CLI::ExistingFile);
    evalCmd->add_option("--reports", ev.reports, "Report directory")->required()->check(CLI::ExistingDirectory);
    evalCmd->add_option("--out", ev.out, "Directory for metrics.csv and roc.csv");

    BenchOptions bench;
    CLI::App* benchCmd = app.add_subcommand("bench-boi", "Compare BoI and BoF on an order-colliding corpus");
    benchCmd->add_option("--out", bench.out, "CSV path (default stdout)");
    benchCmd->add_option("--seeds", bench.seeds, "Number of consecutive seeds");
    benchCmd->add_option("--classes", bench.spec.classes, "Classes");
    benchCmd->add_option("--positions", bench.spec.positions, "Patches per item");
    benchCmd->add_option("--noise", bench.spec.noise, "Per-coordinate noise");
    benchCmd->add_option("--words", bench.spec.wordsPerClass, "Words per class, one row each");
    benchCmd->add_flag("!--disjoint", bench.spec.orderColliding, "Give every class its own parts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) {
            return RunGenerate(g, gen);
        }
        if (train->parsed()) {
            return RunTrain(g, tr);
        }
        if (detect->parsed()) {
            return RunDetect(g, det);
        }
        if (evalCmd->parsed()) {
            return RunEval(g, ev);
        }
        return RunBench(g, bench);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
