/**
 * @file Bof.h
 * @brief Bag-of-features histograms and the bag-of-indexes comparison bench
 *
 * The bench builds a descriptor corpus where every class uses the same set
 * of parts and classes differ only in the order the parts appear along the
 * item. Word frequencies therefore collide across classes and an orderless
 * histogram cannot separate them. Each class trains its own dictionary; the
 * per-class dictionaries are concatenated so that each class owns a
 * contiguous block of word numbers.
 *
 * Items are classified by the nearest class centroid under Euclidean
 * distance, using either the normalized BoF histogram or the BoI binary
 * array (one row per patch, one-hot over the dictionary) max-pooled over its
 * columns inside each band of a row pyramid.
 */

#pragma once

#include <czi/coding/Codebook.h>

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace czi::eval {

struct BofHistogram {
    Eigen::VectorXd counts;
    bool normalized = false;
};

/// Hard-assign each descriptor and count; normalizing divides by the descriptor count.
BofHistogram BofEncode(std::span<const Eigen::VectorXd> descriptors, const coding::Codebook& codebook,
                       bool normalize = false);

/// Column max-pool of the one-hot array inside each band of the pyramid, concatenated.
Eigen::VectorXd BoiPooled(std::span<const int> wordIndexes, int dictionarySize, std::span<const int> pyramid);

struct BenchSpec {
    int classes = 4;
    int positions = 8;       ///< patches per item
    int dimension = 16;
    int trainPerClass = 12;
    int testPerClass = 12;
    double noise = 0.25;     ///< per-coordinate Gaussian noise around the part prototype
    bool orderColliding = true; ///< false gives every class its own parts
    std::vector<int> wordsPerClass = {4, 8, 16};
    std::vector<int> pyramid = {1, 2, 4}; ///< band counts for BoI pooling
};

struct BenchRow {
    int wordsPerClass = 0;
    int dictionarySize = 0;
    double bofAccuracy = 0.0;
    double boiAccuracy = 0.0;
};

/// One row per dictionary size. Throws ParameterError for classes with fewer than two items.
std::vector<BenchRow> BoiVsBofBench(const BenchSpec& spec, uint64_t seed);

/// seed,words_per_class,dictionary_size,bof_accuracy,boi_accuracy
std::string BenchCsvHeader();
std::string BenchToCsv(std::span<const BenchRow> rows, uint64_t seed);

} // namespace czi::eval
