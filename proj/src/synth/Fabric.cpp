/**
 * @file Fabric.cpp
 * @brief Star-lattice renderer and defect painter
 */

#include <czi/synth/Fabric.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace czi::synth {

namespace {

constexpr int kSupersample = 4;
constexpr int kCanonicalExtraWidth = 2;
constexpr double kMinMotifSeparation = 0.05;

using Coverage = std::vector<double>; // primitiveWidth x primitiveHeight

bool InsideStar(double dx, double dy, const MotifStamp& s) {
    // Eight points on the axes and diagonals; crossing-number polygon test.
    std::array<double, 32> v{};
    for (int k = 0; k < 16; ++k) {
        double r = (k % 2 == 0) ? s.outerRadius : s.innerRadius;
        double a = k * std::numbers::pi / 8.0;
        v[2 * k] = r * std::cos(a);
        v[2 * k + 1] = r * std::sin(a);
    }
    bool inside = false;
    for (int i = 0, j = 15; i < 16; j = i++) {
        double xi = v[2 * i], yi = v[2 * i + 1];
        double xj = v[2 * j], yj = v[2 * j + 1];
        if ((yi > dy) != (yj > dy) && dx < (xj - xi) * (dy - yi) / (yj - yi) + xi) {
            inside = !inside;
        }
    }
    return inside;
}

Coverage StampCoverage(const FabricSpec& spec, const MotifStamp& stamp) {
    const int pw = spec.primitiveWidth;
    const int ph = spec.primitiveHeight;
    const double cx = spec.MotifCenterX() + 0.5;
    const double cy = spec.MotifCenterY() + 0.5;
    Coverage cov(static_cast<size_t>(pw) * ph, 0.0);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) {
            int hits = 0;
            for (int sy = 0; sy < kSupersample; ++sy) {
                for (int sx = 0; sx < kSupersample; ++sx) {
                    double px = x + (sx + 0.5) / kSupersample;
                    double py = y + (sy + 0.5) / kSupersample;
                    hits += InsideStar(px - cx, py - cy, stamp) ? 1 : 0;
                }
            }
            cov[static_cast<size_t>(y) * pw + x] = static_cast<double>(hits) / (kSupersample * kSupersample);
        }
    }
    return cov;
}

struct Layout {
    std::vector<int> colStart, colWidth; // per sub-region column, width includes the gap
    std::vector<int> rowStart, rowHeight;
    int width = 0;
    int height = 0;
};

Layout ComputeLayout(const FabricSpec& spec) {
    Layout L;
    const int n = spec.primitivesPerSubregion;
    const size_t phase = static_cast<size_t>(spec.layoutPhase);
    int x = 0;
    for (int j = 0; j < spec.subregionCols; ++j) {
        int w = n * spec.primitiveWidth + spec.columnGaps[(phase + j) % spec.columnGaps.size()];
        L.colStart.push_back(x);
        L.colWidth.push_back(w);
        x += w;
    }
    int y = 0;
    for (int i = 0; i < spec.subregionRows; ++i) {
        int h = n * spec.primitiveHeight + spec.rowGaps[(phase + i) % spec.rowGaps.size()];
        L.rowStart.push_back(y);
        L.rowHeight.push_back(h);
        y += h;
    }
    L.width = x;
    L.height = y;
    return L;
}

void RecomputeFlags(GroundTruth& t) {
    auto maskHits = [&](const Rect& r) {
        for (int y = std::max(0, r.y); y < std::min(t.height, r.Bottom()); ++y) {
            for (int x = std::max(0, r.x); x < std::min(t.width, r.Right()); ++x) {
                if (t.defectMask[static_cast<size_t>(y) * t.width + x]) {
                    return true;
                }
            }
        }
        return false;
    };
    for (size_t p = 0; p < t.primitiveBounds.size(); ++p) {
        if (maskHits(t.primitiveBounds[p])) {
            t.primitiveDefective[p] = 1;
        }
    }
    const int n = t.spec.primitivesPerSubregion;
    for (int i = 0; i < t.spec.subregionRows; ++i) {
        for (int j = 0; j < t.spec.subregionCols; ++j) {
            size_t s = static_cast<size_t>(i) * t.spec.subregionCols + j;
            bool any = maskHits(t.subregionBounds[s]);
            for (int r = 0; r < n && !any; ++r) {
                for (int c = 0; c < n && !any; ++c) {
                    any = t.primitiveDefective[t.PrimitiveIndex(i * n + r, j * n + c)] != 0;
                }
            }
            if (any) {
                t.subregionDefective[s] = 1;
            }
        }
    }
}

} // namespace

std::string_view ToString(DefectKind kind) {
    switch (kind) {
        case DefectKind::BrokenEnd: return "BrokenEnd";
        case DefectKind::Hole: return "Hole";
        case DefectKind::ThickBar: return "ThickBar";
        case DefectKind::ThinBar: return "ThinBar";
        case DefectKind::NettingMultiple: return "NettingMultiple";
    }
    return "Unknown";
}

DefectKind ParseDefectKind(std::string_view name) {
    for (DefectKind k : kAllDefectKinds) {
        if (ToString(k) == name) {
            return k;
        }
    }
    throw DataError("unknown defect kind '" + std::string(name) + "'");
}

DefectSpec DefaultDefect(DefectKind kind, int primitiveRow, int primitiveCol) {
    DefectSpec d;
    d.kind = kind;
    d.primitiveRow = primitiveRow;
    d.primitiveCol = primitiveCol;
    switch (kind) {
        case DefectKind::Hole: d.magnitude = 0.5; d.extent = 3.0; break;
        case DefectKind::ThinBar: d.magnitude = 0.35; d.extent = 1.0; break;
        case DefectKind::ThickBar: d.magnitude = 0.3; d.extent = 4.0; break;
        case DefectKind::BrokenEnd: d.magnitude = 0.45; d.extent = 3.0; break;
        case DefectKind::NettingMultiple: d.magnitude = 0.35; d.extent = 35.0; break;
    }
    return d;
}

bool GroundTruth::AnyDefect() const {
    return std::any_of(subregionDefective.begin(), subregionDefective.end(), [](uint8_t f) { return f != 0; });
}

double StampProjectionMinimum(const FabricSpec& spec, const MotifStamp& stamp) {
    const Coverage cov = StampCoverage(spec, stamp);
    double best = 1.0;
    for (int x = 0; x < spec.primitiveWidth; ++x) {
        double sum = 0.0;
        for (int y = 0; y < spec.primitiveHeight; ++y) {
            double c = cov[static_cast<size_t>(y) * spec.primitiveWidth + x];
            sum += spec.background + c * (stamp.intensity - spec.background);
        }
        best = std::min(best, sum / spec.primitiveHeight);
    }
    return best;
}

void ValidateSpec(const FabricSpec& spec) {
    if (spec.primitiveWidth < 4 || spec.primitiveHeight < 4) {
        throw ParameterError("FabricSpec: primitive must be at least 4x4");
    }
    if (spec.primitivesPerSubregion < 1 || spec.subregionCols < 1 || spec.subregionRows < 1) {
        throw ParameterError("FabricSpec: lattice counts must be positive");
    }
    if (spec.columnGaps.empty() || spec.rowGaps.empty()) {
        throw ParameterError("FabricSpec: gap lists must be non-empty");
    }
    for (int g : spec.columnGaps) {
        if (g < kCanonicalExtraWidth) {
            throw ParameterError("FabricSpec: column gaps must be >= 2 so the lattice tiles the canonical crops");
        }
    }
    for (int g : spec.rowGaps) {
        if (g < 0) {
            throw ParameterError("FabricSpec: row gaps must be >= 0");
        }
    }
    if (spec.layoutPhase < 0) {
        throw ParameterError("FabricSpec: layout phase must be >= 0");
    }
    if (!(spec.noiseAmplitude >= 0.0 && spec.noiseAmplitude <= 0.2)) {
        throw ParameterError("FabricSpec: noise amplitude must lie in [0, 0.2]");
    }
    auto inUnit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!inUnit(spec.background) || !inUnit(spec.star1.intensity) || !inUnit(spec.star2.intensity)) {
        throw ParameterError("FabricSpec: intensities must lie in [0,1]");
    }
    const double maxRadius = std::min(spec.MotifCenterX(), spec.MotifCenterY()) + 0.5;
    for (const MotifStamp* s : {&spec.star1, &spec.star2}) {
        if (!(s->innerRadius > 0.0 && s->innerRadius < s->outerRadius && s->outerRadius <= maxRadius)) {
            throw ParameterError("FabricSpec: star radii must satisfy 0 < inner < outer <= " +
                                 std::to_string(maxRadius));
        }
    }
    if (spec.verifyMotifSeparation) {
        double m1 = StampProjectionMinimum(spec, spec.star1);
        double m2 = StampProjectionMinimum(spec, spec.star2);
        if (!(m1 - m2 >= kMinMotifSeparation)) {
            throw ParameterError("FabricSpec: star-1 projection minimum (" + std::to_string(m1) +
                                 ") must exceed star-2's (" + std::to_string(m2) + ") by at least " +
                                 std::to_string(kMinMotifSeparation));
        }
    }
}

FabricSample GenerateFabric(const FabricSpec& spec) {
    ValidateSpec(spec);
    const Layout L = ComputeLayout(spec);
    const int n = spec.primitivesPerSubregion;
    const int pw = spec.primitiveWidth;
    const int ph = spec.primitiveHeight;
    const Coverage cov1 = StampCoverage(spec, spec.star1);
    const Coverage cov2 = StampCoverage(spec, spec.star2);

    GroundTruth t;
    t.spec = spec;
    t.width = L.width;
    t.height = L.height;
    t.primitiveBounds.resize(static_cast<size_t>(t.PrimitiveRows()) * t.PrimitiveCols());
    t.primitiveKinds.resize(t.primitiveBounds.size());

    std::vector<double> pixels(static_cast<size_t>(L.width) * L.height, spec.background);
    for (int i = 0; i < spec.subregionRows; ++i) {
        const SubRegionKind kind = (i % 2 == 0) ? spec.topKind
                                                : (spec.topKind == SubRegionKind::Subregion1 ? SubRegionKind::Subregion2
                                                                                             : SubRegionKind::Subregion1);
        for (int j = 0; j < spec.subregionCols; ++j) {
            t.subregionBounds.push_back({L.colStart[j], L.rowStart[i], n * pw + kCanonicalExtraWidth, n * ph});
            t.subregionCells.push_back({L.colStart[j], L.rowStart[i], L.colWidth[j], L.rowHeight[i]});
            t.subregionKinds.push_back(kind);
            for (int r = 0; r < n; ++r) {
                const PrimitiveKind motif = RowMotif(kind, r);
                const Coverage& cov = motif == PrimitiveKind::Star1 ? cov1 : cov2;
                const double ink = motif == PrimitiveKind::Star1 ? spec.star1.intensity : spec.star2.intensity;
                for (int c = 0; c < n; ++c) {
                    const Rect cell{L.colStart[j] + c * pw, L.rowStart[i] + r * ph, pw, ph};
                    const int idx = t.PrimitiveIndex(i * n + r, j * n + c);
                    t.primitiveBounds[idx] = cell;
                    t.primitiveKinds[idx] = motif;
                    for (int y = 0; y < ph; ++y) {
                        for (int x = 0; x < pw; ++x) {
                            double a = cov[static_cast<size_t>(y) * pw + x];
                            pixels[static_cast<size_t>(cell.y + y) * L.width + cell.x + x] =
                                spec.background + a * (ink - spec.background);
                        }
                    }
                }
            }
        }
    }

    Rng rng(spec.seed);
    for (double& v : pixels) {
        v = std::clamp(v + rng.Uniform(-spec.noiseAmplitude, spec.noiseAmplitude), 0.0, 1.0);
    }

    t.subregionDefective.assign(t.subregionBounds.size(), 0);
    t.primitiveDefective.assign(t.primitiveBounds.size(), 0);
    t.defectMask.assign(pixels.size(), 0);
    return {imaging::GrayImage(L.width, L.height, std::move(pixels)), std::move(t)};
}

FabricSample InjectDefect(const FabricSample& sample, const DefectSpec& d) {
    const GroundTruth& t0 = sample.truth;
    const FabricSpec& spec = t0.spec;
    if (d.primitiveRow < 0 || d.primitiveRow >= t0.PrimitiveRows() || d.primitiveCol < 0 ||
        d.primitiveCol >= t0.PrimitiveCols()) {
        throw ParameterError("InjectDefect: primitive (" + std::to_string(d.primitiveRow) + "," +
                             std::to_string(d.primitiveCol) + ") lies outside the lattice");
    }
    if (!(d.magnitude > spec.noiseAmplitude) || d.magnitude > 1.0) {
        throw ParameterError("InjectDefect: magnitude must exceed the noise amplitude and be <= 1");
    }
    if (!(d.extent > 0.0)) {
        throw ParameterError("InjectDefect: extent must be > 0");
    }

    FabricSample out = sample;
    imaging::GrayImage& img = out.image;
    GroundTruth& t = out.truth;
    const Rect cell = t.primitiveBounds[t.PrimitiveIndex(d.primitiveRow, d.primitiveCol)];
    const int pw = spec.primitiveWidth;
    const int cx = cell.x + spec.MotifCenterX();
    const int cy = cell.y + spec.MotifCenterY();

    auto paint = [&](int x, int y, double delta) {
        if (x < 0 || y < 0 || x >= img.Width() || y >= img.Height() || delta == 0.0) {
            return;
        }
        img(x, y) = std::clamp(img(x, y) + delta, 0.0, 1.0);
        t.defectMask[static_cast<size_t>(y) * t.width + x] = 1;
    };

    switch (d.kind) {
        case DefectKind::Hole: {
            const double ex = cell.x + pw - 4.5;
            const double ey = cell.y + 3.5;
            const double rx = d.extent;
            const double ry = 0.8 * d.extent;
            for (int y = static_cast<int>(std::floor(ey - ry)); y <= static_cast<int>(std::ceil(ey + ry)); ++y) {
                for (int x = static_cast<int>(std::floor(ex - rx)); x <= static_cast<int>(std::ceil(ex + rx)); ++x) {
                    double u = (x + 0.5 - ex) / rx;
                    double v = (y + 0.5 - ey) / ry;
                    if (u * u + v * v <= 1.0) {
                        paint(x, y, -d.magnitude);
                    }
                }
            }
            break;
        }
        case DefectKind::ThinBar:
        case DefectKind::ThickBar: {
            const int thickness = std::max(1, static_cast<int>(std::lround(d.extent)));
            const int top = cy - (thickness - 1) / 2;
            for (int y = top; y < top + thickness; ++y) {
                for (int x = 0; x < img.Width(); ++x) {
                    paint(x, y, d.magnitude);
                }
            }
            break;
        }
        case DefectKind::BrokenEnd: {
            const PrimitiveKind motif = t.primitiveKinds[t.PrimitiveIndex(d.primitiveRow, d.primitiveCol)];
            const Coverage cov = StampCoverage(spec, motif == PrimitiveKind::Star1 ? spec.star1 : spec.star2);
            const int half = std::max(0, static_cast<int>(std::lround(d.extent)) / 2);
            for (int y = cell.y; y < cy; ++y) {
                for (int x = cx - half; x <= cx + half; ++x) {
                    double a = cov[static_cast<size_t>(y - cell.y) * pw + (x - cell.x)];
                    paint(x, y, a * d.magnitude);
                }
            }
            break;
        }
        case DefectKind::NettingMultiple: {
            const int length = static_cast<int>(std::lround(d.extent));
            const int y = cell.y + 2;
            // Run to the right unless the cell is the last lattice column.
            int x0 = cell.x + 2;
            if (d.primitiveCol == t.PrimitiveCols() - 1) {
                x0 = cell.Right() - 2 - length;
            }
            for (int x = x0; x <= x0 + length; x += 5) {
                paint(x, y, d.magnitude);
                paint(x - 1, y, d.magnitude);
                paint(x + 1, y, d.magnitude);
                paint(x, y - 1, d.magnitude);
                paint(x, y + 1, d.magnitude);
            }
            break;
        }
    }

    t.defects.push_back(d);
    RecomputeFlags(t);
    return out;
}

std::vector<CorpusItem> GenerateCorpus(const CorpusSpec& spec) {
    if (spec.normalCount < 0 || spec.defectiveCount < 0) {
        throw ParameterError("GenerateCorpus: counts must be >= 0");
    }
    std::vector<CorpusItem> items;
    const int total = spec.normalCount + spec.defectiveCount;
    for (int i = 0; i < total; ++i) {
        FabricSpec fs = spec.fabric;
        fs.seed = MixSeed(spec.seed, static_cast<uint64_t>(i));
        fs.layoutPhase = i;
        CorpusItem item;
        item.sample = GenerateFabric(fs);
        char name[64];
        if (i < spec.normalCount) {
            std::snprintf(name, sizeof(name), "normal_%03d", i);
        } else {
            const int k = i - spec.normalCount;
            const DefectKind kind = kAllDefectKinds[k % 5];
            Rng rng(MixSeed(spec.seed, 1000003ULL + static_cast<uint64_t>(i)));
            const int row = static_cast<int>(rng.Index(static_cast<uint64_t>(item.sample.truth.PrimitiveRows())));
            const int col = static_cast<int>(rng.Index(static_cast<uint64_t>(item.sample.truth.PrimitiveCols())));
            item.sample = InjectDefect(item.sample, DefaultDefect(kind, row, col));
            item.defective = true;
            std::snprintf(name, sizeof(name), "defect_%03d_%s", k, std::string(ToString(kind)).c_str());
        }
        item.name = name;
        items.push_back(std::move(item));
    }
    return items;
}

} // namespace czi::synth
