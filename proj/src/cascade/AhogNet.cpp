/**
 * @file AhogNet.cpp
 */

#include <czi/cascade/AhogNet.h>
#include <czi/coding/KMeans.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>

#include <algorithm>
#include <limits>
#include <vector>

namespace czi::cascade {

using coding::Codebook;
using coding::LcreMode;

namespace {

uint64_t KeyStream(const AhogKey& key) {
    return static_cast<uint64_t>(key.lh) * 100000u + static_cast<uint64_t>(key.lv) * 10u +
           (key.kind == SubRegionKind::Subregion1 ? 1u : 2u);
}

double LcreOne(const Eigen::VectorXd& x, const Codebook& cb, const AhogParams& p) {
    const Eigen::VectorXd* begin = &x;
    return coding::Lcre(std::span<const Eigen::VectorXd>(begin, 1), cb, p.coding.beta, p.coding.k, p.mode);
}

Codebook FitDictionary(const Eigen::MatrixXd& data, const AhogKey& key, const AhogParams& p) {
    Codebook cb;
    cb.seed = MixSeed(p.seed, KeyStream(key));
    cb.words = coding::KMeans(data, p.words, cb.seed).centers;
    cb.flavor = coding::CodebookFlavor::LabelEmbedding;
    cb.sizeLh = key.lh;
    cb.sizeLv = key.lv;
    cb.subregionKind = key.kind;
    return cb;
}

} // namespace

std::string AhogKey::ToString() const {
    return std::to_string(lh) + "x" + std::to_string(lv) + "/" + std::string(czi::ToString(kind));
}

const AhogEntry& AhogModel::At(const AhogKey& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) {
        throw DataError("no A-HOG dictionary for size class " + key.ToString());
    }
    return it->second;
}

bool ExceedsThreshold(double epsilon, double theta, LcreMode mode) {
    return mode == LcreMode::WeightedDistance ? epsilon > theta : epsilon < theta;
}

AhogModel TrainAhog(std::span<const AhogSample> samples, const AhogParams& p) {
    if (p.words < 1) {
        throw ParameterError("A-HOG dictionary size must be positive");
    }
    if (!(p.margin >= 0.0) || p.margin >= 1.0) {
        throw ParameterError("calibration margin must lie in [0, 1)");
    }
    coding::ValidateParams(p.coding, p.words);

    std::map<AhogKey, std::vector<const Eigen::VectorXd*>> byKey;
    for (const AhogSample& s : samples) {
        byKey[s.key].push_back(&s.descriptor);
    }
    AhogModel model;
    model.params = p;
    for (const auto& [key, list] : byKey) {
        const int n = static_cast<int>(list.size());
        if (n < p.words) {
            throw ParameterError("size class " + key.ToString() + " has " + std::to_string(n) +
                                 " training sub-regions, fewer than the dictionary size " + std::to_string(p.words));
        }
        Eigen::MatrixXd data(n, list.front()->size());
        for (int i = 0; i < n; ++i) {
            data.row(i) = list[static_cast<size_t>(i)]->transpose();
        }
        AhogEntry entry;
        entry.samples = n;
        entry.codebook = FitDictionary(data, key, p);

        const bool upper = p.mode == LcreMode::WeightedDistance;
        double extreme = upper ? 0.0 : std::numeric_limits<double>::infinity();
        auto absorb = [&](double e) { extreme = upper ? std::max(extreme, e) : std::min(extreme, e); };
        for (int i = 0; i < n; ++i) {
            absorb(LcreOne(data.row(i).transpose(), entry.codebook, p));
        }
        // Held-out scores: the in-sample value is biased because each sample pulls its own word.
        if (p.leaveOneOut && n > p.words) {
            for (int i = 0; i < n; ++i) {
                Eigen::MatrixXd rest(n - 1, data.cols());
                for (int r = 0, w = 0; r < n; ++r) {
                    if (r != i) {
                        rest.row(w++) = data.row(r);
                    }
                }
                absorb(LcreOne(data.row(i).transpose(), FitDictionary(rest, key, p), p));
            }
        }
        entry.trainExtreme = extreme;
        entry.theta = upper ? extreme * (1.0 + p.margin) : extreme * (1.0 - p.margin);
        model.entries.emplace(key, std::move(entry));
    }
    return model;
}

AhogResult AhogStage(const AhogKey& key, const Eigen::VectorXd& descriptor, const AhogModel& model) {
    const AhogEntry& entry = model.At(key);
    AhogResult r;
    r.epsilon = LcreOne(descriptor, entry.codebook, model.params);
    r.theta = entry.theta;
    r.defective = ExceedsThreshold(r.epsilon, r.theta, model.params.mode);
    return r;
}

nlohmann::json AhogModelToJson(const AhogModel& model) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, e] : model.entries) {
        entries.push_back({{"lh", key.lh},
                           {"lv", key.lv},
                           {"kind", std::string(czi::ToString(key.kind))},
                           {"theta", e.theta},
                           {"train_extreme", e.trainExtreme},
                           {"samples", e.samples},
                           {"codebook", coding::CodebookToJson(e.codebook)}});
    }
    return {{"lcre_mode", coding::ToString(model.params.mode)}, {"entries", entries}};
}

AhogModel AhogModelFromJson(const nlohmann::json& j, const AhogParams& params) {
    try {
        AhogModel model;
        model.params = params;
        model.params.mode = coding::ParseLcreMode(j.at("lcre_mode").get<std::string>());
        for (const auto& e : j.at("entries")) {
            AhogKey key;
            key.lh = e.at("lh").get<int>();
            key.lv = e.at("lv").get<int>();
            const std::string kind = e.at("kind").get<std::string>();
            if (kind != "subregion1" && kind != "subregion2") {
                throw DataError("unknown sub-region kind '" + kind + "' in model");
            }
            key.kind = kind == "subregion1" ? SubRegionKind::Subregion1 : SubRegionKind::Subregion2;
            AhogEntry entry;
            entry.theta = e.at("theta").get<double>();
            entry.trainExtreme = e.at("train_extreme").get<double>();
            entry.samples = e.at("samples").get<int>();
            entry.codebook = coding::CodebookFromJson(e.at("codebook"));
            model.entries.emplace(key, std::move(entry));
        }
        return model;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed A-HOG model: ") + ex.what());
    } catch (const ParameterError& ex) {
        throw DataError(std::string("malformed A-HOG model: ") + ex.what());
    }
}

} // namespace czi::cascade
