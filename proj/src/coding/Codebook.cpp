/**
 * @file Codebook.cpp
 */

#include <czi/coding/Codebook.h>
#include <czi/core/Error.h>

#include <algorithm>
#include <string>

namespace czi::coding {

namespace {

constexpr const char* kFormat = "czi-codebook";
constexpr int kVersion = 1;

const char* FlavorName(CodebookFlavor f) {
    return f == CodebookFlavor::LabelEmbedding ? "label-embedding" : "number-embedding";
}

} // namespace

void ValidateCodebook(const Codebook& cb) {
    if (cb.words.rows() < 1 || cb.words.cols() < 1) {
        throw DataError("codebook has no words");
    }
    if (!cb.words.allFinite()) {
        throw DataError("codebook contains non-finite values");
    }
    if (cb.flavor == CodebookFlavor::NumberEmbedding) {
        if (static_cast<int>(cb.numbering.size()) != cb.Size()) {
            throw DataError("codebook numbering length does not match word count");
        }
        std::vector<int> sorted = cb.numbering;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < cb.Size(); ++i) {
            if (sorted[i] != i + 1) {
                throw DataError("codebook numbering is not a permutation of 1..M");
            }
        }
    }
}

nlohmann::json CodebookToJson(const Codebook& cb) {
    ValidateCodebook(cb);
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["flavor"] = FlavorName(cb.flavor);
    j["rows"] = cb.words.rows();
    j["cols"] = cb.words.cols();
    j["seed"] = cb.seed;
    if (cb.flavor == CodebookFlavor::LabelEmbedding) {
        j["size_class"] = {{"lh", cb.sizeLh}, {"lv", cb.sizeLv}};
        j["subregion_kind"] = std::string(ToString(cb.subregionKind));
    } else {
        j["numbering"] = cb.numbering;
    }
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(cb.words.size()));
    for (Eigen::Index r = 0; r < cb.words.rows(); ++r) {
        for (Eigen::Index c = 0; c < cb.words.cols(); ++c) {
            flat.push_back(cb.words(r, c));
        }
    }
    j["words"] = std::move(flat);
    return j;
}

Codebook CodebookFromJson(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kFormat) {
            throw DataError("not a codebook record");
        }
        if (j.at("version").get<int>() != kVersion) {
            throw DataError("unsupported codebook version " + std::to_string(j.at("version").get<int>()));
        }
        Codebook cb;
        const std::string flavor = j.at("flavor").get<std::string>();
        if (flavor == "label-embedding") {
            cb.flavor = CodebookFlavor::LabelEmbedding;
            cb.sizeLh = j.at("size_class").at("lh").get<int>();
            cb.sizeLv = j.at("size_class").at("lv").get<int>();
            const std::string kind = j.at("subregion_kind").get<std::string>();
            if (kind == "subregion1") {
                cb.subregionKind = SubRegionKind::Subregion1;
            } else if (kind == "subregion2") {
                cb.subregionKind = SubRegionKind::Subregion2;
            } else {
                throw DataError("unknown sub-region kind '" + kind + "'");
            }
        } else if (flavor == "number-embedding") {
            cb.flavor = CodebookFlavor::NumberEmbedding;
            cb.numbering = j.at("numbering").get<std::vector<int>>();
        } else {
            throw DataError("unknown codebook flavor '" + flavor + "'");
        }
        cb.seed = j.at("seed").get<uint64_t>();
        const auto rows = j.at("rows").get<Eigen::Index>();
        const auto cols = j.at("cols").get<Eigen::Index>();
        const auto flat = j.at("words").get<std::vector<double>>();
        if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(flat.size()) != rows * cols) {
            throw DataError("codebook word array does not match its dimensions");
        }
        cb.words.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                cb.words(r, c) = flat[static_cast<size_t>(r * cols + c)];
            }
        }
        ValidateCodebook(cb);
        return cb;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed codebook: ") + e.what());
    }
}

} // namespace czi::coding
