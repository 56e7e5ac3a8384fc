/**
 * @file SiftNet.cpp
 */

#include <czi/cascade/SiftNet.h>
#include <czi/coding/KMeans.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace czi::cascade {

using coding::Codebook;

BinaryArray::BinaryArray(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
        throw ParameterError("BinaryArray: negative shape");
    }
    bits_.assign(static_cast<size_t>(rows) * cols, 0);
}

BinaryArray OneHot(std::span<const int> indexes, int m) {
    if (m < 1) {
        throw ParameterError("one-hot width must be positive");
    }
    BinaryArray out(static_cast<int>(indexes.size()), m);
    for (size_t p = 0; p < indexes.size(); ++p) {
        if (indexes[p] < 1 || indexes[p] > m) {
            throw ParameterError("word index " + std::to_string(indexes[p]) + " outside [1, " + std::to_string(m) +
                                 "]");
        }
        out.Set(static_cast<int>(p), indexes[p] - 1, true);
    }
    return out;
}

std::vector<int> RowArgmax(const BinaryArray& a) {
    std::vector<int> out(static_cast<size_t>(a.Rows()), 0);
    for (int r = 0; r < a.Rows(); ++r) {
        for (int c = 0; c < a.Cols(); ++c) {
            if (a(r, c)) {
                out[static_cast<size_t>(r)] = c + 1;
                break;
            }
        }
    }
    return out;
}

int Hamming(const BinaryArray& a, const BinaryArray& b) {
    if (a.Rows() != b.Rows() || a.Cols() != b.Cols()) {
        throw ParameterError("Hamming: arrays are " + std::to_string(a.Rows()) + "x" + std::to_string(a.Cols()) +
                             " and " + std::to_string(b.Rows()) + "x" + std::to_string(b.Cols()));
    }
    int dif = 0;
    for (int r = 0; r < a.Rows(); ++r) {
        for (int c = 0; c < a.Cols(); ++c) {
            dif += a(r, c) ^ b(r, c);
        }
    }
    return dif;
}

const SiftKindModel& SiftModel::At(PrimitiveKind kind) const {
    auto it = kinds.find(kind);
    if (it == kinds.end()) {
        throw DataError(std::string("no SIFT model for primitive kind ") + std::string(ToString(kind)));
    }
    return it->second;
}

double MaxNearestWordDistance(std::span<const Eigen::VectorXd> descriptors, const SiftKindModel& model) {
    double worst = 0.0;
    for (const Eigen::VectorXd& x : descriptors) {
        worst = std::max(worst, std::sqrt(coding::SquaredDistances(x, model.codebook).minCoeff()));
    }
    return worst;
}

SiftModel TrainSift(std::span<const SiftSample> samples, const SiftNetParams& p) {
    if (!(p.margin >= 0.0)) {
        throw ParameterError("scope margin must be non-negative");
    }
    std::map<PrimitiveKind, std::vector<const SiftSample*>> byKind;
    for (const SiftSample& s : samples) {
        byKind[s.kind].push_back(&s);
    }
    if (byKind.empty()) {
        throw ParameterError("SIFT training needs at least one primitive");
    }
    SiftModel model;
    model.params = p;
    for (const auto& [kind, list] : byKind) {
        const size_t patches = list.front()->descriptors.size();
        if (patches == 0) {
            throw ParameterError("SIFT training primitive without descriptors");
        }
        const Eigen::Index dim = list.front()->descriptors.front().size();
        const uint64_t kindStream = kind == PrimitiveKind::Star1 ? 1 : 2;

        SiftKindModel km;
        km.samples = static_cast<int>(list.size());
        km.codebook.flavor = coding::CodebookFlavor::NumberEmbedding;
        km.codebook.seed = MixSeed(p.seed, kindStream);
        km.codebook.words.resize(static_cast<Eigen::Index>(patches), dim);
        for (size_t pos = 0; pos < patches; ++pos) {
            Eigen::MatrixXd data(static_cast<Eigen::Index>(list.size()), dim);
            for (size_t i = 0; i < list.size(); ++i) {
                if (list[i]->descriptors.size() != patches || list[i]->descriptors[pos].size() != dim) {
                    throw ParameterError("SIFT training primitives differ in patch count or dimension");
                }
                data.row(static_cast<Eigen::Index>(i)) = list[i]->descriptors[pos].transpose();
            }
            km.codebook.words.row(static_cast<Eigen::Index>(pos)) =
                coding::KMeans(data, 1, MixSeed(km.codebook.seed, pos)).centers.row(0);
        }
        // Random numbering of the words: word j carries number numbering[j].
        km.codebook.numbering.resize(patches);
        std::iota(km.codebook.numbering.begin(), km.codebook.numbering.end(), 1);
        Rng rng(km.codebook.seed);
        rng.Shuffle(std::span<int>(km.codebook.numbering));
        km.t1 = OneHot(km.codebook.numbering, static_cast<int>(patches));

        for (const SiftSample* s : list) {
            km.trainMaxDistance = std::max(km.trainMaxDistance, MaxNearestWordDistance(s->descriptors, km));
        }
        km.rho = km.trainMaxDistance * (1.0 + p.margin);
        if (!(km.rho > 0.0)) {
            throw DataError("SIFT training produced a zero scope radius; primitives carry no texture");
        }
        model.kinds.emplace(kind, std::move(km));
    }
    return model;
}

BoiResult BoiMap(std::span<const Eigen::VectorXd> descriptors, const SiftKindModel& model,
                 const coding::CodingParams& params) {
    BoiResult out;
    const int k = std::min(params.k, model.codebook.Size());
    for (size_t pos = 0; pos < descriptors.size(); ++pos) {
        const coding::RlcResult r = coding::RlcAssign(descriptors[pos], model.codebook, k, model.rho, params.lambda);
        if (const auto* oos = std::get_if<coding::OutOfScope>(&r)) {
            out.outOfScopeAt = static_cast<int>(pos);
            out.outOfScopeDistance = oos->distance;
            return out;
        }
        const auto& code = std::get<coding::RlcCode>(r);
        out.indexes.push_back(model.codebook.numbering[static_cast<size_t>(code.nearest)]);
        out.distances.push_back(code.nearestDistance);
    }
    return out;
}

const char* ToString(FailureStep step) {
    switch (step) {
        case FailureStep::None:
            return "none";
        case FailureStep::Scope:
            return "scope";
        case FailureStep::Index:
            return "index";
        case FailureStep::Distance:
            return "distance";
    }
    return "none";
}

SiftResult SiftStage(std::span<const Eigen::VectorXd> descriptors, PrimitiveKind kind, const SiftModel& model) {
    const SiftKindModel& km = model.At(kind);
    SiftResult out;
    out.maxDistance = MaxNearestWordDistance(descriptors, km);
    const BoiResult boi = BoiMap(descriptors, km, model.params.coding);
    out.indexes = boi.indexes;
    if (boi.outOfScopeAt) {
        out.defective = true;
        out.failure = FailureStep::Scope;
        out.failurePosition = *boi.outOfScopeAt;
        return out;
    }
    out.dif = Hamming(km.t1, OneHot(boi.indexes, km.codebook.Size()));
    if (out.dif != 0) {
        out.defective = true;
        out.failure = FailureStep::Index;
        return out;
    }
    const double worst = *std::max_element(boi.distances.begin(), boi.distances.end());
    if (worst >= km.rho) {
        out.defective = true;
        out.failure = FailureStep::Distance;
    }
    return out;
}

nlohmann::json SiftModelToJson(const SiftModel& model) {
    nlohmann::json kinds = nlohmann::json::array();
    for (const auto& [kind, km] : model.kinds) {
        nlohmann::json t1 = nlohmann::json::array();
        for (int r = 0; r < km.t1.Rows(); ++r) {
            std::vector<int> row;
            for (int c = 0; c < km.t1.Cols(); ++c) {
                row.push_back(km.t1(r, c));
            }
            t1.push_back(row);
        }
        kinds.push_back({{"kind", std::string(ToString(kind))},
                         {"rho", km.rho},
                         {"train_max_distance", km.trainMaxDistance},
                         {"samples", km.samples},
                         {"t1", t1},
                         {"codebook", coding::CodebookToJson(km.codebook)}});
    }
    return {{"kinds", kinds}};
}

SiftModel SiftModelFromJson(const nlohmann::json& j, const SiftNetParams& params) {
    try {
        SiftModel model;
        model.params = params;
        for (const auto& e : j.at("kinds")) {
            const std::string name = e.at("kind").get<std::string>();
            if (name != "star1" && name != "star2") {
                throw DataError("unknown primitive kind '" + name + "' in model");
            }
            SiftKindModel km;
            km.rho = e.at("rho").get<double>();
            km.trainMaxDistance = e.at("train_max_distance").get<double>();
            km.samples = e.at("samples").get<int>();
            km.codebook = coding::CodebookFromJson(e.at("codebook"));
            const auto rows = e.at("t1").get<std::vector<std::vector<int>>>();
            km.t1 = BinaryArray(static_cast<int>(rows.size()), km.codebook.Size());
            for (size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<int>(rows[r].size()) != km.codebook.Size()) {
                    throw DataError("template row width does not match the dictionary size");
                }
                for (size_t c = 0; c < rows[r].size(); ++c) {
                    km.t1.Set(static_cast<int>(r), static_cast<int>(c), rows[r][c] != 0);
                }
            }
            if (!(km.rho > 0.0)) {
                throw DataError("model scope radius must be positive");
            }
            model.kinds.emplace(name == "star1" ? PrimitiveKind::Star1 : PrimitiveKind::Star2, std::move(km));
        }
        return model;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed SIFT model: ") + ex.what());
    }
}

} // namespace czi::cascade
