/**
 * @file Kinds.h
 * @brief Lattice unit labels shared by the generator, segmentation and detector
 */

#pragma once

#include <string_view>

namespace czi {

enum class PrimitiveKind { Star1, Star2 };

/// Subregion1 rows read star-1, star-2, star-1; Subregion2 rows read star-2, star-1, star-2.
enum class SubRegionKind { Subregion1, Subregion2 };

constexpr PrimitiveKind Opposite(PrimitiveKind k) {
    return k == PrimitiveKind::Star1 ? PrimitiveKind::Star2 : PrimitiveKind::Star1;
}

/// Motif of primitive row @p row (0..2) inside a sub-region of kind @p kind.
constexpr PrimitiveKind RowMotif(SubRegionKind kind, int row) {
    PrimitiveKind first = kind == SubRegionKind::Subregion1 ? PrimitiveKind::Star1 : PrimitiveKind::Star2;
    return row % 2 == 0 ? first : Opposite(first);
}

constexpr std::string_view ToString(PrimitiveKind k) {
    return k == PrimitiveKind::Star1 ? "star1" : "star2";
}

constexpr std::string_view ToString(SubRegionKind k) {
    return k == SubRegionKind::Subregion1 ? "subregion1" : "subregion2";
}

} // namespace czi
