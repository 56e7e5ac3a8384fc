/**
 * @file Segmentation.cpp
 */

#include <czi/segment/Segmentation.h>
#include <czi/core/Error.h>
#include <czi/imaging/Projection.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace czi::segment {

using imaging::GrayImage;
using imaging::ProjectionAxis;
using imaging::ProjectionCurve;

namespace {

constexpr int kSpacingTolerance = 2;

// Minima that rise by at least minProminence on both sides within `window` samples.
std::vector<int> ProminentMinima(const ProjectionCurve& curve, int separation, double minProminence) {
    const auto& v = curve.values;
    const int n = static_cast<int>(v.size());
    std::vector<int> out;
    for (int i : imaging::LocalMinima(curve, separation)) {
        double leftMax = v[i];
        double rightMax = v[i];
        for (int k = std::max(0, i - separation); k < i; ++k) {
            leftMax = std::max(leftMax, v[k]);
        }
        for (int k = i + 1; k <= std::min(n - 1, i + separation); ++k) {
            rightMax = std::max(rightMax, v[k]);
        }
        if (std::min(leftMax, rightMax) - v[i] >= minProminence) {
            out.push_back(i);
        }
    }
    return out;
}

std::string Join(const std::vector<int>& xs) {
    std::string s;
    for (int x : xs) {
        s += (s.empty() ? "" : " ") + std::to_string(x);
    }
    return s;
}

[[noreturn]] void Fail(const std::string& what, const GrayImage& img) {
    std::string dump = imaging::DumpCurve(imaging::Project(img, ProjectionAxis::Vertical)) +
                       imaging::DumpCurve(imaging::Project(img, ProjectionAxis::Horizontal));
    throw SegmentationError(what, std::move(dump));
}

struct AxisGroup {
    int first = 0; ///< first lattice minimum of the group
    int last = 0;
    int cellStart = 0;
    int cellEnd = 0;
};

struct AnchorFit {
    int anchor = 0;
    int matched = 0;
    int agreeing = 0;
};

/**
 * Lattice anchor a such that a + k * pitch (k < n) lands on observed minima.
 * Each hypothesis collects the nearest minimum within the tolerance of every
 * lattice slot; the anchor is the offset (m_k - k * pitch) shared by most
 * matched minima, ties going to the deepest minimum. A defect that moves or
 * erases one minimum is outvoted by the other two.
 */
std::optional<AnchorFit> FitAnchor(const std::vector<int>& minima, const std::vector<double>& curve,
                                   const std::vector<int>& hypotheses, int pitch, int n) {
    std::optional<AnchorFit> best;
    double bestDepth = 0.0;
    for (int h : hypotheses) {
        std::vector<std::pair<int, double>> offsets; // (m_k - k*pitch, curve value at m_k)
        for (int k = 0; k < n; ++k) {
            const int slot = h + k * pitch;
            int pick = -1;
            for (int m : minima) {
                if (std::abs(m - slot) <= kSpacingTolerance && (pick < 0 || std::abs(m - slot) < std::abs(pick - slot))) {
                    pick = m;
                }
            }
            if (pick >= 0) {
                offsets.emplace_back(pick - k * pitch, curve[static_cast<size_t>(pick)]);
            }
        }
        if (offsets.empty()) {
            continue;
        }
        AnchorFit fit;
        fit.matched = static_cast<int>(offsets.size());
        double depth = 0.0;
        for (const auto& [o, v] : offsets) {
            int count = 0;
            double deepest = v;
            for (const auto& [o2, v2] : offsets) {
                if (o2 == o) {
                    ++count;
                    deepest = std::min(deepest, v2);
                }
            }
            if (count > fit.agreeing || (count == fit.agreeing && deepest < depth)) {
                fit.agreeing = count;
                fit.anchor = o;
                depth = deepest;
            }
        }
        if (!best || fit.matched > best->matched || (fit.matched == best->matched && fit.agreeing > best->agreeing) ||
            (fit.matched == best->matched && fit.agreeing == best->agreeing && depth < bestDepth)) {
            best = fit;
            bestDepth = depth;
        }
    }
    return best;
}

/// Agreement of the lattice slots a + k * pitch with observed minima: 1 for an exact hit, less when off by one or two.
double SlotScore(const std::vector<int>& minima, int a, int pitch, int n, int& matched) {
    double score = 0.0;
    matched = 0;
    for (int k = 0; k < n; ++k) {
        int bestDist = kSpacingTolerance + 1;
        for (int m : minima) {
            bestDist = std::min(bestDist, std::abs(m - (a + k * pitch)));
        }
        if (bestDist <= kSpacingTolerance) {
            ++matched;
            score += 1.0 / (1.0 + bestDist * bestDist);
        }
    }
    return score;
}

/**
 * Global lattice fit along one axis. Candidate anchors come from every minimum
 * at every slot of a group; a chain of anchors is admissible when consecutive
 * anchors are one allowed cell size apart. The chain with the highest total slot
 * agreement wins, so a group with one displaced or missing minimum is still
 * placed by its neighbours and its two intact minima.
 */
std::vector<AxisGroup> GroupMinima(const std::vector<int>& minima, const std::vector<int>& cellSizes, int perGroup,
                                   int pitch, int offset, int extent, const char* axisName, const GrayImage& img) {
    std::vector<int> anchors;
    for (int m : minima) {
        for (int k = 0; k < perGroup; ++k) {
            anchors.push_back(m - k * pitch);
        }
    }
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    std::vector<int> candidates;
    std::vector<double> scores;
    for (int a : anchors) {
        int matched = 0;
        const double sc = SlotScore(minima, a, pitch, perGroup, matched);
        if (matched >= perGroup - 1 && a - offset >= -kSpacingTolerance && a + (perGroup - 1) * pitch < extent) {
            candidates.push_back(a);
            scores.push_back(sc);
        }
    }
    if (candidates.empty()) {
        Fail(std::string("segmentation: ") + std::to_string(minima.size()) + " " + axisName + " minima (" +
                 Join(minima) + ") contain no group of " + std::to_string(perGroup) + " lattice-spaced minima",
             img);
    }

    const size_t nc = candidates.size();
    std::vector<double> best(nc);
    std::vector<int> length(nc, 1);
    std::vector<int> prev(nc, -1);
    for (size_t c = 0; c < nc; ++c) {
        best[c] = scores[c];
        for (size_t q = 0; q < c; ++q) {
            const int step = candidates[c] - candidates[q];
            if (std::find(cellSizes.begin(), cellSizes.end(), step) == cellSizes.end()) {
                continue;
            }
            const double total = best[q] + scores[c];
            if (total > best[c] + 1e-12 || (std::abs(total - best[c]) <= 1e-12 && length[q] + 1 > length[c])) {
                best[c] = total;
                length[c] = length[q] + 1;
                prev[c] = static_cast<int>(q);
            }
        }
    }
    size_t end = 0;
    for (size_t c = 1; c < nc; ++c) {
        if (best[c] > best[end] + 1e-12) {
            end = c;
        }
    }

    std::vector<AxisGroup> out;
    for (int c = static_cast<int>(end); c >= 0; c = prev[static_cast<size_t>(c)]) {
        AxisGroup g;
        g.first = candidates[static_cast<size_t>(c)];
        g.last = g.first + (perGroup - 1) * pitch;
        g.cellStart = std::max(0, g.first - offset);
        out.push_back(g);
    }
    std::reverse(out.begin(), out.end());
    for (size_t g = 0; g < out.size(); ++g) {
        out[g].cellEnd = (g + 1 < out.size()) ? out[g + 1].cellStart : extent;
    }
    return out;
}

bool InRange(const std::vector<int>& allowed, int v) {
    return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

// Lattice anchor near `expected` on a local curve; falls back to `expected` when fewer than n-1 minima agree.
int RefineAnchor(const ProjectionCurve& curve, int expected, int pitch, int n, int separation, double minProminence) {
    const std::vector<int> minima = ProminentMinima(curve, separation, minProminence);
    std::vector<int> hypotheses;
    for (int d = -kSpacingTolerance; d <= kSpacingTolerance; ++d) {
        hypotheses.push_back(expected + d);
    }
    const auto fit = FitAnchor(minima, curve.values, hypotheses, pitch, n);
    if (!fit || fit->matched < n - 1 || std::abs(fit->anchor - expected) > kSpacingTolerance) {
        return expected;
    }
    return fit->anchor;
}

} // namespace

SubRegion MakeSubRegion(const GrayImage& img, const Rect& bounds, int padding) {
    SubRegion sr;
    sr.bounds = bounds;
    sr.padding = padding;
    sr.pixels = img.Crop(bounds);
    sr.context = img.Crop(bounds.Padded(padding));
    return sr;
}

std::vector<SubRegion> SegmentRule1(const GrayImage& img, const SegmentationParams& p) {
    if (img.Empty()) {
        throw SegmentationError("segmentation: empty image", "");
    }
    const ProjectionCurve cols = imaging::Project(img, ProjectionAxis::Vertical);
    const ProjectionCurve rows = imaging::Project(img, ProjectionAxis::Horizontal);
    const std::vector<int> colMin = ProminentMinima(cols, p.MinSeparationX(), p.minProminence);
    const std::vector<int> rowMin = ProminentMinima(rows, p.MinSeparationY(), p.minProminence);

    const auto xGroups = GroupMinima(colMin, p.widthRange, p.primitivesPerSide, p.primitiveWidth, p.motifOffsetX,
                                     img.Width(), "column", img);
    const auto yGroups = GroupMinima(rowMin, p.heightRange, p.primitivesPerSide, p.primitiveHeight, p.motifOffsetY,
                                     img.Height(), "row", img);

    std::vector<SubRegion> out;
    for (size_t gy = 0; gy < yGroups.size(); ++gy) {
        for (size_t gx = 0; gx < xGroups.size(); ++gx) {
            const AxisGroup& X = xGroups[gx];
            const AxisGroup& Y = yGroups[gy];
            SizeClass sc;
            sc.lh = X.cellEnd - X.cellStart;
            sc.lv = Y.cellEnd - Y.cellStart;
            sc.h1 = X.first - X.cellStart;
            sc.h2 = X.cellEnd - X.last - 1;
            sc.v1 = Y.first - Y.cellStart;
            sc.v2 = Y.cellEnd - Y.last - 1;
            if (!InRange(p.widthRange, sc.lh) || !InRange(p.heightRange, sc.lv)) {
                Fail("segmentation: raw cell (" + std::to_string(gx) + "," + std::to_string(gy) + ") measures " +
                         std::to_string(sc.lh) + "x" + std::to_string(sc.lv) + ", outside the configured size ranges",
                     img);
            }

            // Pad the raw cell, then re-locate the first minima on local curves.
            const Rect raw{X.cellStart, Y.cellStart, sc.lh, sc.lv};
            const GrayImage padded = img.Crop(raw.Padded(p.padding));
            const int n = p.primitivesPerSide;
            const int fx = RefineAnchor(imaging::Project(padded, ProjectionAxis::Vertical), p.padding + sc.h1,
                                        p.primitiveWidth, n, p.MinSeparationX(), p.minProminence);
            const int fy = RefineAnchor(imaging::Project(padded, ProjectionAxis::Horizontal), p.padding + sc.v1,
                                        p.primitiveHeight, n, p.MinSeparationY(), p.minProminence);
            const Rect canonical{raw.x - p.padding + fx - p.motifOffsetX, raw.y - p.padding + fy - p.motifOffsetY,
                                 p.subregionWidth, p.subregionHeight};

            SubRegion sr = MakeSubRegion(img, canonical, p.padding);
            sr.sizeClass = sc;
            sr.gridRow = static_cast<int>(gy);
            sr.gridCol = static_cast<int>(gx);
            out.push_back(std::move(sr));
        }
    }
    return out;
}

std::vector<Primitive> SegmentRule2(const SubRegion& sr, const SegmentationParams& p) {
    const int n = p.primitivesPerSide;
    const ProjectionCurve cols = imaging::Project(sr.pixels, ProjectionAxis::Vertical);
    const ProjectionCurve rows = imaging::Project(sr.pixels, ProjectionAxis::Horizontal);
    const int ax = RefineAnchor(cols, p.motifOffsetX, p.primitiveWidth, n, p.MinSeparationX(), p.minProminence);
    const int ay = RefineAnchor(rows, p.motifOffsetY, p.primitiveHeight, n, p.MinSeparationY(), p.minProminence);
    std::vector<int> colMin;
    std::vector<int> rowMin;
    for (int k = 0; k < n; ++k) {
        colMin.push_back(ax + k * p.primitiveWidth);
        rowMin.push_back(ay + k * p.primitiveHeight);
    }

    std::vector<Primitive> out;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            Primitive prim;
            prim.row = r;
            prim.col = c;
            prim.bounds = {sr.bounds.x + colMin[c] - p.motifOffsetX, sr.bounds.y + rowMin[r] - p.motifOffsetY,
                           p.primitiveWidth, p.primitiveHeight};
            // Cut from the padded context so a slightly misplaced window still yields the same crop.
            const Rect local = prim.bounds.Shifted(-(sr.bounds.x - sr.padding), -(sr.bounds.y - sr.padding));
            prim.pixels = sr.context.Empty() ? sr.pixels.Crop(prim.bounds.Shifted(-sr.bounds.x, -sr.bounds.y))
                                             : sr.context.Crop(local);
            out.push_back(std::move(prim));
        }
    }
    return out;
}

double PrimitiveProjectionMinimum(const GrayImage& pixels) {
    const ProjectionCurve c = imaging::Project(pixels, ProjectionAxis::Vertical);
    return *std::min_element(c.values.begin(), c.values.end());
}

PrimitiveClassifier CalibrateClassifier(std::span<const Primitive> primitives) {
    if (primitives.size() < 2) {
        throw ParameterError("CalibrateClassifier: need at least two primitives");
    }
    std::vector<double> mins;
    for (const Primitive& p : primitives) {
        mins.push_back(PrimitiveProjectionMinimum(p.pixels));
    }
    // Two-means in one dimension, started from the extremes.
    double lo = *std::min_element(mins.begin(), mins.end());
    double hi = *std::max_element(mins.begin(), mins.end());
    if (hi - lo <= 0.0) {
        throw DataError("CalibrateClassifier: all primitives have the same projection minimum");
    }
    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double sLo = 0.0, sHi = 0.0;
        int nLo = 0, nHi = 0;
        for (double m : mins) {
            if (m > mid) {
                sHi += m;
                ++nHi;
            } else {
                sLo += m;
                ++nLo;
            }
        }
        const double newLo = sLo / nLo;
        const double newHi = sHi / nHi;
        if (newLo == lo && newHi == hi) {
            break;
        }
        lo = newLo;
        hi = newHi;
    }
    return {0.5 * (lo + hi), hi, lo};
}

PrimitiveClassifier CalibrateClassifier(std::span<const Primitive> primitives, std::span<const PrimitiveKind> labels) {
    if (primitives.size() != labels.size()) {
        throw ParameterError("CalibrateClassifier: label count mismatch");
    }
    double s1 = 0.0, s2 = 0.0;
    int n1 = 0, n2 = 0;
    for (size_t i = 0; i < primitives.size(); ++i) {
        const double m = PrimitiveProjectionMinimum(primitives[i].pixels);
        if (labels[i] == PrimitiveKind::Star1) {
            s1 += m;
            ++n1;
        } else {
            s2 += m;
            ++n2;
        }
    }
    if (n1 == 0 || n2 == 0) {
        throw ParameterError("CalibrateClassifier: both motifs must be represented");
    }
    const double m1 = s1 / n1;
    const double m2 = s2 / n2;
    return {0.5 * (m1 + m2), m1, m2};
}

PrimitiveKind ClassifyPrimitive(const Primitive& p, const PrimitiveClassifier& classifier) {
    return PrimitiveProjectionMinimum(p.pixels) > classifier.midpoint ? PrimitiveKind::Star1 : PrimitiveKind::Star2;
}

SubregionReading ReadSubregion(std::span<const Primitive> primitives, const PrimitiveClassifier& classifier, int n) {
    if (static_cast<int>(primitives.size()) != n * n) {
        throw ClassificationError("ClassifySubregion: expected " + std::to_string(n * n) + " primitives");
    }
    SubregionReading out;
    out.rowKinds.resize(static_cast<size_t>(n));
    for (int r = 0; r < n; ++r) {
        int star1 = 0;
        for (int c = 0; c < n; ++c) {
            star1 += ClassifyPrimitive(primitives[r * n + c], classifier) == PrimitiveKind::Star1 ? 1 : 0;
        }
        out.rowKinds[r] = 2 * star1 > n ? PrimitiveKind::Star1 : PrimitiveKind::Star2;
    }
    const PrimitiveKind middle = out.rowKinds[n / 2];
    out.kind = middle == PrimitiveKind::Star2 ? SubRegionKind::Subregion1 : SubRegionKind::Subregion2;
    for (int r = 0; r < n; ++r) {
        if (out.rowKinds[r] != RowMotif(out.kind, r)) {
            out.inconsistentRow = r;
            break;
        }
    }
    return out;
}

SubRegionKind ClassifySubregion(std::span<const Primitive> primitives, const PrimitiveClassifier& classifier,
                                int n) {
    const SubregionReading reading = ReadSubregion(primitives, classifier, n);
    if (!reading.Consistent()) {
        const int r = reading.inconsistentRow;
        throw ClassificationError("ClassifySubregion: row " + std::to_string(r) + " reads " +
                                  std::string(ToString(reading.rowKinds[r])) + ", inconsistent with " +
                                  std::string(ToString(reading.kind)));
    }
    return reading.kind;
}

SubRegionKind ClassifySubregion(const SubRegion& sr, const PrimitiveClassifier& classifier,
                                const SegmentationParams& params) {
    const std::vector<Primitive> prims = SegmentRule2(sr, params);
    return ClassifySubregion(prims, classifier, params.primitivesPerSide);
}

GrayImage DrawOverlay(const GrayImage& img, std::span<const SubRegion> subregions,
                      std::span<const Primitive> primitives) {
    GrayImage out = img;
    auto outline = [&](const Rect& r, double value) {
        for (int x = r.x; x < r.Right(); ++x) {
            for (int y : {r.y, r.Bottom() - 1}) {
                if (x >= 0 && y >= 0 && x < out.Width() && y < out.Height()) {
                    out(x, y) = value;
                }
            }
        }
        for (int y = r.y; y < r.Bottom(); ++y) {
            for (int x : {r.x, r.Right() - 1}) {
                if (x >= 0 && y >= 0 && x < out.Width() && y < out.Height()) {
                    out(x, y) = value;
                }
            }
        }
    };
    for (const Primitive& p : primitives) {
        outline(p.bounds, 0.0);
    }
    for (const SubRegion& s : subregions) {
        outline(s.bounds, 1.0);
    }
    return out;
}

} // namespace czi::segment
