/**
 * @file Bof.cpp
 */

#include <czi/coding/Coding.h>
#include <czi/coding/KMeans.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>
#include <czi/eval/Bof.h>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace czi::eval {

namespace {

struct BenchItem {
    int label = 0;
    std::vector<Eigen::VectorXd> patches;
};

int Nearest(const Eigen::VectorXd& x, const coding::Codebook& cb) {
    return coding::NearestWords(coding::SquaredDistances(x, cb), 1).front();
}

int NearestCentroid(const Eigen::VectorXd& f, const std::vector<Eigen::VectorXd>& centroids) {
    int best = 0;
    double bestDist = (f - centroids[0]).squaredNorm();
    for (size_t c = 1; c < centroids.size(); ++c) {
        const double d = (f - centroids[c]).squaredNorm();
        if (d < bestDist) {
            bestDist = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

double Accuracy(const std::vector<Eigen::VectorXd>& trainFeatures, const std::vector<BenchItem>& train,
                const std::vector<Eigen::VectorXd>& testFeatures, const std::vector<BenchItem>& test, int classes) {
    std::vector<Eigen::VectorXd> centroids(static_cast<size_t>(classes),
                                           Eigen::VectorXd::Zero(trainFeatures.front().size()));
    std::vector<int> counts(static_cast<size_t>(classes), 0);
    for (size_t i = 0; i < train.size(); ++i) {
        centroids[static_cast<size_t>(train[i].label)] += trainFeatures[i];
        ++counts[static_cast<size_t>(train[i].label)];
    }
    for (int c = 0; c < classes; ++c) {
        centroids[static_cast<size_t>(c)] /= counts[static_cast<size_t>(c)];
    }
    int correct = 0;
    for (size_t i = 0; i < test.size(); ++i) {
        correct += NearestCentroid(testFeatures[i], centroids) == test[i].label ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

} // namespace

BofHistogram BofEncode(std::span<const Eigen::VectorXd> descriptors, const coding::Codebook& codebook,
                       bool normalize) {
    BofHistogram h;
    h.counts = Eigen::VectorXd::Zero(codebook.Size());
    h.normalized = normalize;
    for (const Eigen::VectorXd& d : descriptors) {
        if (d.size() != codebook.Dimension()) {
            throw ParameterError("descriptor length " + std::to_string(d.size()) + " does not match dictionary " +
                                 std::to_string(codebook.Dimension()));
        }
        h.counts(Nearest(d, codebook)) += 1.0;
    }
    if (normalize && !descriptors.empty()) {
        h.counts /= static_cast<double>(descriptors.size());
    }
    return h;
}

Eigen::VectorXd BoiPooled(std::span<const int> wordIndexes, int dictionarySize, std::span<const int> pyramid) {
    const int rows = static_cast<int>(wordIndexes.size());
    int bands = 0;
    for (int b : pyramid) {
        if (b < 1 || b > rows) {
            throw ParameterError("pyramid band count must lie in [1, patch count]");
        }
        bands += b;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bands) * dictionarySize);
    Eigen::Index offset = 0;
    for (int b : pyramid) {
        for (int r = 0; r < rows; ++r) {
            const int band = r * b / rows;
            const int w = wordIndexes[static_cast<size_t>(r)];
            if (w < 0 || w >= dictionarySize) {
                throw ParameterError("word index outside the dictionary");
            }
            out(offset + static_cast<Eigen::Index>(band) * dictionarySize + w) = 1.0;
        }
        offset += static_cast<Eigen::Index>(b) * dictionarySize;
    }
    return out;
}

std::vector<BenchRow> BoiVsBofBench(const BenchSpec& spec, uint64_t seed) {
    if (spec.classes < 2) {
        throw ParameterError("the bench needs at least two classes");
    }
    if (spec.trainPerClass < 1 || spec.testPerClass < 1) {
        throw ParameterError("every class needs at least one training and one held-out item");
    }
    if (spec.positions < 1 || spec.dimension < 1 || !(spec.noise >= 0.0)) {
        throw ParameterError("bench positions and dimension must be positive, noise non-negative");
    }

    Rng rng(MixSeed(seed, 0));
    const int partSets = spec.orderColliding ? 1 : spec.classes;
    std::vector<std::vector<Eigen::VectorXd>> parts(static_cast<size_t>(partSets));
    for (auto& set : parts) {
        for (int p = 0; p < spec.positions; ++p) {
            Eigen::VectorXd v(spec.dimension);
            for (int j = 0; j < spec.dimension; ++j) {
                v(j) = rng.Normal();
            }
            set.push_back(v);
        }
    }
    // Class c visits the parts in its own order; with shared parts only the order differs.
    if (spec.orderColliding) {
        long permutations = 1;
        for (int p = 2; p <= spec.positions && permutations < spec.classes; ++p) {
            permutations *= p;
        }
        if (permutations < spec.classes) {
            throw ParameterError("too few positions for that many distinct part orders");
        }
    }
    std::vector<std::vector<int>> orders;
    while (static_cast<int>(orders.size()) < spec.classes) {
        std::vector<int> order(static_cast<size_t>(spec.positions));
        std::iota(order.begin(), order.end(), 0);
        if (spec.orderColliding && !orders.empty()) {
            rng.Shuffle(std::span<int>(order));
            if (std::find(orders.begin(), orders.end(), order) != orders.end()) {
                continue;
            }
        }
        orders.push_back(std::move(order));
    }

    auto makeItems = [&](int perClass, uint64_t stream) {
        Rng noise(MixSeed(seed, stream));
        std::vector<BenchItem> items;
        for (int c = 0; c < spec.classes; ++c) {
            const auto& set = parts[static_cast<size_t>(spec.orderColliding ? 0 : c)];
            for (int i = 0; i < perClass; ++i) {
                BenchItem item;
                item.label = c;
                for (int p = 0; p < spec.positions; ++p) {
                    Eigen::VectorXd v = set[static_cast<size_t>(orders[static_cast<size_t>(c)][static_cast<size_t>(p)])];
                    for (int j = 0; j < spec.dimension; ++j) {
                        v(j) += spec.noise * noise.Normal();
                    }
                    item.patches.push_back(std::move(v));
                }
                items.push_back(std::move(item));
            }
        }
        return items;
    };
    const std::vector<BenchItem> train = makeItems(spec.trainPerClass, 1);
    const std::vector<BenchItem> test = makeItems(spec.testPerClass, 2);

    std::vector<BenchRow> rows;
    for (int words : spec.wordsPerClass) {
        const int perClassDescriptors = spec.trainPerClass * spec.positions;
        if (words < 1 || words > perClassDescriptors) {
            throw ParameterError("words per class must lie in [1, training descriptors per class]");
        }
        coding::Codebook cb;
        cb.words.resize(static_cast<Eigen::Index>(words) * spec.classes, spec.dimension);
        cb.seed = seed;
        for (int c = 0; c < spec.classes; ++c) {
            Eigen::MatrixXd data(perClassDescriptors, spec.dimension);
            int r = 0;
            for (const BenchItem& item : train) {
                if (item.label == c) {
                    for (const Eigen::VectorXd& v : item.patches) {
                        data.row(r++) = v.transpose();
                    }
                }
            }
            const coding::KMeansResult km =
                coding::KMeans(data, words, MixSeed(seed, 100 + static_cast<uint64_t>(c) * 1000 + words));
            cb.words.middleRows(static_cast<Eigen::Index>(c) * words, words) = km.centers;
        }

        auto features = [&](const std::vector<BenchItem>& items, bool boi) {
            std::vector<Eigen::VectorXd> out;
            for (const BenchItem& item : items) {
                if (boi) {
                    std::vector<int> idx;
                    for (const Eigen::VectorXd& v : item.patches) {
                        idx.push_back(Nearest(v, cb));
                    }
                    out.push_back(BoiPooled(idx, cb.Size(), spec.pyramid));
                } else {
                    out.push_back(BofEncode(item.patches, cb, true).counts);
                }
            }
            return out;
        };
        BenchRow row;
        row.wordsPerClass = words;
        row.dictionarySize = cb.Size();
        row.bofAccuracy = Accuracy(features(train, false), train, features(test, false), test, spec.classes);
        row.boiAccuracy = Accuracy(features(train, true), train, features(test, true), test, spec.classes);
        rows.push_back(row);
    }
    return rows;
}

std::string BenchCsvHeader() {
    return "seed,words_per_class,dictionary_size,bof_accuracy,boi_accuracy\n";
}

std::string BenchToCsv(std::span<const BenchRow> rows, uint64_t seed) {
    std::ostringstream out;
    char buf[64];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.bofAccuracy, r.boiAccuracy);
        out << seed << ',' << r.wordsPerClass << ',' << r.dictionarySize << ',' << buf << '\n';
    }
    return out.str();
}

} // namespace czi::eval
