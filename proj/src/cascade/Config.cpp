/**
 * @file Config.cpp
 */

#include <czi/cascade/Config.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

namespace czi::cascade {

using nlohmann::json;

namespace {

void RejectUnknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) {
        throw ParameterError("config section '" + where + "' must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ParameterError("unknown config key '" + where + (where.empty() ? "" : ".") + key + "'");
        }
    }
}

template <class T>
void Take(const json& j, const char* key, T& field) {
    if (j.contains(key)) {
        field = j.at(key).get<T>();
    }
}

json CodingToJson(const coding::CodingParams& c) {
    return {{"beta", c.beta}, {"k", c.k}, {"lambda", c.lambda}, {"sigma", c.sigma}};
}

void CodingFromJson(const json& j, coding::CodingParams& c, const std::string& where) {
    RejectUnknown(j, {"beta", "k", "lambda", "sigma"}, where);
    Take(j, "beta", c.beta);
    Take(j, "k", c.k);
    Take(j, "lambda", c.lambda);
    Take(j, "sigma", c.sigma);
}

} // namespace

void CascadeConfig::ApplySeed(uint64_t s) {
    seed = s;
    ahog.seed = MixSeed(s, 101);
    siftNet.seed = MixSeed(s, 202);
}

json ConfigToJson(const CascadeConfig& c) {
    const auto& s = c.segmentation;
    return {
        {"seed", c.seed},
        {"threads", c.threads},
        {"smoothing", {{"sigma", s.smoothing.sigma}, {"radius", s.smoothing.radius}}},
        {"segmentation",
         {{"primitive_width", s.primitiveWidth},
          {"primitive_height", s.primitiveHeight},
          {"primitives_per_side", s.primitivesPerSide},
          {"motif_offset_x", s.motifOffsetX},
          {"motif_offset_y", s.motifOffsetY},
          {"subregion_width", s.subregionWidth},
          {"subregion_height", s.subregionHeight},
          {"padding", s.padding},
          {"width_range", s.widthRange},
          {"height_range", s.heightRange},
          {"min_prominence", s.minProminence}}},
        {"hog",
         {{"block_width", c.hog.blockWidth},
          {"block_height", c.hog.blockHeight},
          {"cell_width", c.hog.cellWidth},
          {"cell_height", c.hog.cellHeight},
          {"bins", c.hog.bins}}},
        {"sift",
         {{"patch_size", c.sift.patchSize},
          {"stride", c.sift.stride},
          {"spatial_bins", c.sift.spatialBins},
          {"orientation_bins", c.sift.orientationBins},
          {"clamp", c.sift.clamp}}},
        {"ahog",
         {{"words", c.ahog.words},
          {"coding", CodingToJson(c.ahog.coding)},
          {"lcre_mode", coding::ToString(c.ahog.mode)},
          {"margin", c.ahog.margin},
          {"leave_one_out", c.ahog.leaveOneOut}}},
        {"sift_net", {{"coding", CodingToJson(c.siftNet.coding)}, {"margin", c.siftNet.margin}}},
    };
}

CascadeConfig ConfigFromJson(const json& j, CascadeConfig c) {
    try {
        RejectUnknown(j, {"seed", "threads", "smoothing", "segmentation", "hog", "sift", "ahog", "sift_net"}, "");
        if (j.contains("seed")) {
            c.ApplySeed(j.at("seed").get<uint64_t>());
        }
        Take(j, "threads", c.threads);
        auto& s = c.segmentation;
        if (j.contains("smoothing")) {
            const json& x = j.at("smoothing");
            RejectUnknown(x, {"sigma", "radius"}, "smoothing");
            Take(x, "sigma", s.smoothing.sigma);
            Take(x, "radius", s.smoothing.radius);
        }
        if (j.contains("segmentation")) {
            const json& x = j.at("segmentation");
            RejectUnknown(x,
                          {"primitive_width", "primitive_height", "primitives_per_side", "motif_offset_x",
                           "motif_offset_y", "subregion_width", "subregion_height", "padding", "width_range",
                           "height_range", "min_prominence"},
                          "segmentation");
            Take(x, "primitive_width", s.primitiveWidth);
            Take(x, "primitive_height", s.primitiveHeight);
            Take(x, "primitives_per_side", s.primitivesPerSide);
            Take(x, "motif_offset_x", s.motifOffsetX);
            Take(x, "motif_offset_y", s.motifOffsetY);
            Take(x, "subregion_width", s.subregionWidth);
            Take(x, "subregion_height", s.subregionHeight);
            Take(x, "padding", s.padding);
            Take(x, "width_range", s.widthRange);
            Take(x, "height_range", s.heightRange);
            Take(x, "min_prominence", s.minProminence);
        }
        if (j.contains("hog")) {
            const json& x = j.at("hog");
            RejectUnknown(x, {"block_width", "block_height", "cell_width", "cell_height", "bins"}, "hog");
            Take(x, "block_width", c.hog.blockWidth);
            Take(x, "block_height", c.hog.blockHeight);
            Take(x, "cell_width", c.hog.cellWidth);
            Take(x, "cell_height", c.hog.cellHeight);
            Take(x, "bins", c.hog.bins);
        }
        if (j.contains("sift")) {
            const json& x = j.at("sift");
            RejectUnknown(x, {"patch_size", "stride", "spatial_bins", "orientation_bins", "clamp"}, "sift");
            Take(x, "patch_size", c.sift.patchSize);
            Take(x, "stride", c.sift.stride);
            Take(x, "spatial_bins", c.sift.spatialBins);
            Take(x, "orientation_bins", c.sift.orientationBins);
            Take(x, "clamp", c.sift.clamp);
        }
        if (j.contains("ahog")) {
            const json& x = j.at("ahog");
            RejectUnknown(x, {"words", "coding", "lcre_mode", "margin", "leave_one_out"}, "ahog");
            Take(x, "words", c.ahog.words);
            if (x.contains("coding")) {
                CodingFromJson(x.at("coding"), c.ahog.coding, "ahog.coding");
            }
            if (x.contains("lcre_mode")) {
                c.ahog.mode = coding::ParseLcreMode(x.at("lcre_mode").get<std::string>());
            }
            Take(x, "margin", c.ahog.margin);
            Take(x, "leave_one_out", c.ahog.leaveOneOut);
        }
        if (j.contains("sift_net")) {
            const json& x = j.at("sift_net");
            RejectUnknown(x, {"coding", "margin"}, "sift_net");
            if (x.contains("coding")) {
                CodingFromJson(x.at("coding"), c.siftNet.coding, "sift_net.coding");
            }
            Take(x, "margin", c.siftNet.margin);
        }
    } catch (const json::exception& e) {
        throw ParameterError(std::string("invalid config value: ") + e.what());
    }
    c.sift.primitiveWidth = c.segmentation.primitiveWidth;
    c.sift.primitiveHeight = c.segmentation.primitiveHeight;
    ValidateConfig(c);
    return c;
}

CascadeConfig LoadConfig(const std::filesystem::path& path, CascadeConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot open config file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParameterError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return ConfigFromJson(j, std::move(base));
}

std::string ConfigHash(const CascadeConfig& cfg) {
    json j = ConfigToJson(cfg);
    j.erase("threads");
    const std::string text = j.dump();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ValidateConfig(const CascadeConfig& c) {
    if (c.threads < 1) {
        throw ParameterError("threads must be at least 1");
    }
    if (c.ahog.words < 1) {
        throw ParameterError("ahog.words must be at least 1");
    }
    coding::ValidateParams(c.ahog.coding, c.ahog.words);
    if (!(c.ahog.margin >= 0.0) || c.ahog.margin >= 1.0) {
        throw ParameterError("ahog.margin must lie in [0, 1)");
    }
    if (!(c.siftNet.margin >= 0.0)) {
        throw ParameterError("sift_net.margin must be non-negative");
    }
    coding::ValidateParams(c.siftNet.coding, std::max(c.siftNet.coding.k, 1));
    if (c.segmentation.smoothing.sigma <= 0.0 || c.segmentation.smoothing.radius < 1) {
        throw ParameterError("smoothing needs sigma > 0 and radius >= 1");
    }
    if (c.sift.PatchCount() < 1) {
        throw ParameterError("SIFT patch does not fit inside the primitive");
    }
}

} // namespace czi::cascade
