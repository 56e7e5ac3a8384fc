/**
 * @file Projection.cpp
 */

#include <czi/imaging/Projection.h>
#include <czi/core/Error.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace czi::imaging {

ProjectionCurve Project(const GrayImage& img, ProjectionAxis axis) {
    if (img.Empty()) {
        throw ParameterError("Project: empty image");
    }
    ProjectionCurve curve;
    curve.axis = axis;
    const int w = img.Width();
    const int h = img.Height();
    if (axis == ProjectionAxis::Horizontal) {
        curve.values.resize(h);
        for (int y = 0; y < h; ++y) {
            double sum = 0.0;
            for (int x = 0; x < w; ++x) {
                sum += img(x, y);
            }
            curve.values[y] = sum / w;
        }
    } else {
        curve.values.assign(w, 0.0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                curve.values[x] += img(x, y);
            }
        }
        for (double& v : curve.values) {
            v /= h;
        }
    }
    return curve;
}

std::vector<int> LocalMinima(std::span<const double> values, int minSeparation) {
    if (minSeparation < 1) {
        throw ParameterError("LocalMinima: min separation must be >= 1");
    }
    const int n = static_cast<int>(values.size());
    std::vector<int> candidates;
    for (int i = 1; i + 1 < n; ++i) {
        if (values[i] <= values[i - 1] && values[i] <= values[i + 1]) {
            candidates.push_back(i);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](int a, int b) { return values[a] < values[b]; });

    std::vector<int> accepted;
    for (int c : candidates) {
        bool clear = std::all_of(accepted.begin(), accepted.end(),
                                 [&](int a) { return std::abs(a - c) >= minSeparation; });
        if (clear) {
            accepted.push_back(c);
        }
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

std::string DumpCurve(const ProjectionCurve& curve) {
    std::string out = curve.axis == ProjectionAxis::Horizontal ? "# horizontal projection\n"
                                                               : "# vertical projection\n";
    char line[64];
    for (size_t i = 0; i < curve.values.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu %.6f\n", i, curve.values[i]);
        out += line;
    }
    return out;
}

} // namespace czi::imaging
