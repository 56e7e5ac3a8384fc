/**
 * @file Sift.cpp
 */

#include <czi/features/Sift.h>
#include <czi/core/Error.h>
#include <czi/segment/Segmentation.h>

#include <cmath>
#include <numbers>
#include <string>

namespace czi::features {

using imaging::GrayImage;

Eigen::VectorXd SiftPatch(const GrayImage& img, int x0, int y0, const SiftParams& p) {
    const int nb = p.spatialBins;
    const int no = p.orientationBins;
    const double cellSize = static_cast<double>(p.patchSize) / nb;
    const double sigma = p.patchSize / 2.0;
    const double center = p.patchSize / 2.0;
    const double twoPi = 2.0 * std::numbers::pi;
    Eigen::VectorXd desc = Eigen::VectorXd::Zero(nb * nb * no);

    for (int py = 0; py < p.patchSize; ++py) {
        for (int px = 0; px < p.patchSize; ++px) {
            const int x = x0 + px;
            const int y = y0 + py;
            const double gx = img.AtClamped(x + 1, y) - img.AtClamped(x - 1, y);
            const double gy = img.AtClamped(x, y + 1) - img.AtClamped(x, y - 1);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) {
                continue;
            }
            const double dx = px + 0.5 - center;
            const double dy = py + 0.5 - center;
            const double w = mag * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));

            double theta = std::atan2(gy, gx);
            if (theta < 0.0) {
                theta += twoPi;
            }
            const double to = theta / twoPi * no;
            const int o0 = static_cast<int>(std::floor(to));
            const double fo = to - o0;

            const double u = (px + 0.5) / cellSize - 0.5;
            const double v = (py + 0.5) / cellSize - 0.5;
            const int u0 = static_cast<int>(std::floor(u));
            const int v0 = static_cast<int>(std::floor(v));
            const double fu = u - u0;
            const double fv = v - v0;

            for (int dv = 0; dv <= 1; ++dv) {
                const int cy = v0 + dv;
                if (cy < 0 || cy >= nb) {
                    continue;
                }
                const double wv = dv ? fv : 1.0 - fv;
                for (int du = 0; du <= 1; ++du) {
                    const int cx = u0 + du;
                    if (cx < 0 || cx >= nb) {
                        continue;
                    }
                    const double wu = du ? fu : 1.0 - fu;
                    const int base = (cy * nb + cx) * no;
                    desc[base + (o0 % no + no) % no] += w * wv * wu * (1.0 - fo);
                    desc[base + (o0 + 1) % no] += w * wv * wu * fo;
                }
            }
        }
    }

    double norm = desc.norm();
    if (norm < 1e-12) {
        return Eigen::VectorXd::Zero(desc.size());
    }
    desc /= norm;
    desc = desc.cwiseMin(p.clamp);
    return desc / desc.norm();
}

std::vector<Descriptor> DenseSift(const GrayImage& pixels, const SiftParams& p) {
    if (pixels.Width() != p.primitiveWidth || pixels.Height() != p.primitiveHeight) {
        throw ParameterError("DenseSift: primitive must be canonical " + std::to_string(p.primitiveWidth) + "x" +
                             std::to_string(p.primitiveHeight) + ", got " + std::to_string(pixels.Width()) + "x" +
                             std::to_string(pixels.Height()));
    }
    std::vector<Descriptor> out;
    for (int k = 0; k < p.PatchCount(); ++k) {
        Descriptor d;
        d.kind = DescriptorKind::SIFT;
        d.values = SiftPatch(pixels, k * p.stride, 0, p);
        d.origin = {k * p.stride, 0, p.patchSize, p.patchSize};
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Descriptor> DenseSift(const segment::Primitive& prim, const SiftParams& p) {
    std::vector<Descriptor> out = DenseSift(prim.pixels, p);
    for (Descriptor& d : out) {
        d.origin = d.origin.Shifted(prim.bounds.x, prim.bounds.y);
    }
    return out;
}

} // namespace czi::features
