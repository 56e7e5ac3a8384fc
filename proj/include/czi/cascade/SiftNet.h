/**
 * @file SiftNet.h
 * @brief Second cascade stage: dense SIFT, restrictive coding, bag of indexes and template matching
 */

#pragma once

#include <czi/coding/Codebook.h>
#include <czi/coding/Coding.h>
#include <czi/core/Kinds.h>

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace czi::cascade {

/// N x M matrix over {0,1}, row-major.
class BinaryArray {
public:
    BinaryArray() = default;
    BinaryArray(int rows, int cols);

    int Rows() const { return rows_; }
    int Cols() const { return cols_; }
    uint8_t operator()(int r, int c) const { return bits_[static_cast<size_t>(r) * cols_ + c]; }
    void Set(int r, int c, bool v) { bits_[static_cast<size_t>(r) * cols_ + c] = v ? 1 : 0; }
    bool operator==(const BinaryArray&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<uint8_t> bits_;
};

/// Row p carries a single 1 at column indexes[p] - 1. Throws ParameterError for an index outside [1, m].
BinaryArray OneHot(std::span<const int> indexes, int m);

/// 1-based column of the first 1 in each row (0 for an all-zero row).
std::vector<int> RowArgmax(const BinaryArray& a);

/// Number of differing bits. Throws ParameterError on a shape mismatch.
int Hamming(const BinaryArray& a, const BinaryArray& b);

struct SiftNetParams {
    coding::CodingParams coding{10.0, 3, 1e-4, 1.0, 1.0};
    double margin = 0.10; ///< relative margin on the scope radius
    uint64_t seed = 1;
};

/// Number-embedding model of one primitive kind.
struct SiftKindModel {
    coding::Codebook codebook; ///< one word per patch position, randomly numbered
    BinaryArray t1;            ///< template: patch p activates its own word's number
    double rho = 0.0;
    double trainMaxDistance = 0.0;
    int samples = 0;
};

struct SiftModel {
    SiftNetParams params;
    std::map<PrimitiveKind, SiftKindModel> kinds;

    const SiftKindModel& At(PrimitiveKind kind) const;
};

struct SiftSample {
    PrimitiveKind kind = PrimitiveKind::Star1;
    std::vector<Eigen::VectorXd> descriptors; ///< patch order
};

/**
 * @brief One K-Means word per patch position and kind, seeded random numbering,
 * template T1 and scope radius rho from normal primitives.
 *
 * Throws ParameterError when a kind has no samples or patch counts differ.
 */
SiftModel TrainSift(std::span<const SiftSample> samples, const SiftNetParams& params);

struct BoiResult {
    std::vector<int> indexes;          ///< assigned word numbers, patch order
    std::vector<double> distances;     ///< nearest in-scope word distance per descriptor
    std::optional<int> outOfScopeAt;   ///< first patch with no word inside the scope
    double outOfScopeDistance = 0.0;
};

/// Bag-of-indexes map; stops at the first out-of-scope descriptor.
BoiResult BoiMap(std::span<const Eigen::VectorXd> descriptors, const SiftKindModel& model,
                 const coding::CodingParams& params);

enum class FailureStep { None, Scope, Index, Distance };

const char* ToString(FailureStep step);

struct SiftResult {
    bool defective = false;
    FailureStep failure = FailureStep::None;
    int dif = -1;               ///< Hamming distance to T1, -1 when short-circuited by the scope test
    double maxDistance = 0.0;   ///< largest nearest-word distance over all patches
    int failurePosition = -1;   ///< patch index of a scope failure
    std::vector<int> indexes;
};

/// Two-step decision on one primitive's descriptors.
SiftResult SiftStage(std::span<const Eigen::VectorXd> descriptors, PrimitiveKind kind, const SiftModel& model);

/// Largest distance from any descriptor to its nearest word (the stage-2 score).
double MaxNearestWordDistance(std::span<const Eigen::VectorXd> descriptors, const SiftKindModel& model);

nlohmann::json SiftModelToJson(const SiftModel& model);
SiftModel SiftModelFromJson(const nlohmann::json& j, const SiftNetParams& params);

} // namespace czi::cascade
