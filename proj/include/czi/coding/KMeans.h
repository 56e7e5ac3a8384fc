/**
 * @file KMeans.h
 * @brief Lloyd's algorithm with k-means++ seeding
 */

#pragma once

#include <czi/coding/Codebook.h>
#include <czi/features/Descriptor.h>

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace czi::coding {

struct KMeansResult {
    Eigen::MatrixXd centers;            ///< M x D
    std::vector<int> assignment;        ///< per data row
    std::vector<double> sseHistory;     ///< within-cluster SSE after each assignment step
    int iterations = 0;
};

/**
 * @brief Cluster the rows of @p data into @p m groups.
 *
 * Stops when assignments repeat or after @p maxIterations. An empty cluster is
 * re-seeded at the point farthest from its current centre. Deterministic for a
 * fixed seed. Throws ParameterError when data has fewer than m rows.
 */
KMeansResult KMeans(const Eigen::MatrixXd& data, int m, uint64_t seed, int maxIterations = 100);

/// Stack descriptors into an N x D matrix. Throws ParameterError on mixed dimensions.
Eigen::MatrixXd StackDescriptors(std::span<const features::Descriptor> descriptors);

/// K-Means codebook over descriptors (label-embedding flavor, key unset).
Codebook TrainCodebook(std::span<const features::Descriptor> descriptors, int m, uint64_t seed);

} // namespace czi::coding
