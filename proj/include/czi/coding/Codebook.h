/**
 * @file Codebook.h
 * @brief Visual-word dictionary and its versioned text serialization
 */

#pragma once

#include <czi/core/Kinds.h>

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <vector>

namespace czi::coding {

enum class CodebookFlavor { LabelEmbedding, NumberEmbedding };

struct Codebook {
    Eigen::MatrixXd words;            ///< M x D, one visual word per row
    CodebookFlavor flavor = CodebookFlavor::LabelEmbedding;
    uint64_t seed = 0;                ///< K-Means / numbering seed

    // Label embedding: the dictionary key.
    int sizeLh = 0;
    int sizeLv = 0;
    SubRegionKind subregionKind = SubRegionKind::Subregion1;

    // Number embedding: numbering[j] is the 1-based number of word j (a permutation of 1..M).
    std::vector<int> numbering;

    int Size() const { return static_cast<int>(words.rows()); }
    int Dimension() const { return static_cast<int>(words.cols()); }
};

/// Throws DataError when words are empty or numbering is not a bijection onto 1..M.
void ValidateCodebook(const Codebook& cb);

nlohmann::json CodebookToJson(const Codebook& cb);
Codebook CodebookFromJson(const nlohmann::json& j);

} // namespace czi::coding
