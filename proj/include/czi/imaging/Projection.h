/**
 * @file Projection.h
 * @brief Projection curves and their local minima
 *
 * A horizontal projection holds one mean per row (length = height); a vertical
 * projection holds one mean per column (length = width).
 */

#pragma once

#include <czi/imaging/GrayImage.h>

#include <span>
#include <string>
#include <vector>

namespace czi::imaging {

enum class ProjectionAxis { Horizontal, Vertical };

struct ProjectionCurve {
    ProjectionAxis axis = ProjectionAxis::Horizontal;
    std::vector<double> values;
};

/// Mean intensity per row (Horizontal) or per column (Vertical). Throws on empty input.
ProjectionCurve Project(const GrayImage& img, ProjectionAxis axis);

/**
 * @brief Interior local minima with non-maximum suppression.
 *
 * Index i (endpoints excluded) is a candidate when values[i] is <= both
 * neighbours. Candidates are accepted in order of increasing value (ties by
 * lower index) and rejected if closer than @p minSeparation to an accepted one.
 * The result is sorted ascending.
 */
std::vector<int> LocalMinima(std::span<const double> values, int minSeparation);

inline std::vector<int> LocalMinima(const ProjectionCurve& curve, int minSeparation) {
    return LocalMinima(curve.values, minSeparation);
}

/// One "index value" pair per line, for diagnostics.
std::string DumpCurve(const ProjectionCurve& curve);

} // namespace czi::imaging
