/**
 * @file Manifest.cpp
 */

#include <czi/synth/Manifest.h>
#include <czi/core/Error.h>

#include <json.hpp>

#include <fstream>

namespace czi::synth {

using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

json RectJson(const Rect& r) { return json::array({r.x, r.y, r.width, r.height}); }

Rect RectFromJson(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw DataError("manifest: rectangle must be [x,y,w,h]");
    }
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

} // namespace

ManifestEntry MakeEntry(const std::string& image, const GroundTruth& truth) {
    ManifestEntry e;
    e.image = image;
    e.defective = truth.AnyDefect();
    e.seed = truth.spec.seed;
    e.layoutPhase = truth.spec.layoutPhase;
    e.subregionRows = truth.spec.subregionRows;
    e.subregionCols = truth.spec.subregionCols;
    e.primitivesPerSubregion = truth.spec.primitivesPerSubregion;
    e.subregionDefective = truth.subregionDefective;
    e.primitiveDefective = truth.primitiveDefective;
    e.subregionBounds = truth.subregionBounds;
    e.defects = truth.defects;
    return e;
}

void WriteManifest(const Manifest& manifest, const std::filesystem::path& path) {
    json images = json::array();
    for (const ManifestEntry& e : manifest.entries) {
        json bounds = json::array();
        for (const Rect& r : e.subregionBounds) {
            bounds.push_back(RectJson(r));
        }
        json defects = json::array();
        for (const DefectSpec& d : e.defects) {
            defects.push_back({{"kind", std::string(ToString(d.kind))},
                               {"row", d.primitiveRow},
                               {"col", d.primitiveCol},
                               {"magnitude", d.magnitude},
                               {"extent", d.extent}});
        }
        images.push_back({{"image", e.image},
                          {"defective", e.defective},
                          {"seed", e.seed},
                          {"layout_phase", e.layoutPhase},
                          {"subregion_rows", e.subregionRows},
                          {"subregion_cols", e.subregionCols},
                          {"primitives_per_subregion", e.primitivesPerSubregion},
                          {"subregion_defective", e.subregionDefective},
                          {"primitive_defective", e.primitiveDefective},
                          {"subregion_bounds", bounds},
                          {"defects", defects}});
    }
    json doc = {{"format", "czi-manifest"}, {"version", kManifestVersion}, {"images", images}};
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write manifest '" + path.string() + "'");
    }
    out << doc.dump(1) << '\n';
}

Manifest ReadManifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open manifest '" + path.string() + "'");
    }
    Manifest m;
    m.baseDir = path.parent_path();
    try {
        json doc = json::parse(in);
        if (doc.at("format") != "czi-manifest" || doc.at("version").get<int>() != kManifestVersion) {
            throw DataError("manifest '" + path.string() + "' has an unsupported format or version");
        }
        for (const json& j : doc.at("images")) {
            ManifestEntry e;
            e.image = j.at("image").get<std::string>();
            e.defective = j.at("defective").get<bool>();
            e.seed = j.value("seed", uint64_t{0});
            e.layoutPhase = j.value("layout_phase", 0);
            e.subregionRows = j.at("subregion_rows").get<int>();
            e.subregionCols = j.at("subregion_cols").get<int>();
            e.primitivesPerSubregion = j.value("primitives_per_subregion", 3);
            e.subregionDefective = j.at("subregion_defective").get<std::vector<uint8_t>>();
            e.primitiveDefective = j.at("primitive_defective").get<std::vector<uint8_t>>();
            for (const json& r : j.value("subregion_bounds", json::array())) {
                e.subregionBounds.push_back(RectFromJson(r));
            }
            for (const json& d : j.value("defects", json::array())) {
                DefectSpec spec;
                spec.kind = ParseDefectKind(d.at("kind").get<std::string>());
                spec.primitiveRow = d.at("row").get<int>();
                spec.primitiveCol = d.at("col").get<int>();
                spec.magnitude = d.at("magnitude").get<double>();
                spec.extent = d.at("extent").get<double>();
                e.defects.push_back(spec);
            }
            const size_t srCount = static_cast<size_t>(e.subregionRows) * e.subregionCols;
            const size_t n = static_cast<size_t>(e.primitivesPerSubregion);
            if (e.subregionDefective.size() != srCount || e.primitiveDefective.size() != srCount * n * n) {
                throw DataError("manifest entry '" + e.image + "' has flag arrays of the wrong length");
            }
            m.entries.push_back(std::move(e));
        }
    } catch (const json::exception& ex) {
        throw DataError("malformed manifest '" + path.string() + "': " + ex.what());
    }
    return m;
}

} // namespace czi::synth
