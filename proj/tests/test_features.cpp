/**
 * @file test_features.cpp
 * @brief A-HOG and dense SIFT descriptors
 */

#include <doctest.h>

#include <czi/core/Error.h>
#include <czi/core/Random.h>
#include <czi/features/Hog.h>
#include <czi/features/Sift.h>
#include <czi/segment/Segmentation.h>
#include <czi/synth/Fabric.h>

#include <cmath>

using namespace czi;
using namespace czi::features;
using imaging::GrayImage;

namespace {

GrayImage Ramp(int w, int h, double ax, double ay, double offset = 0.1) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img(x, y) = offset + ax * x + ay * y;
        }
    }
    return img;
}

GrayImage RandomImage(int w, int h, uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Rng rng(seed);
    GrayImage img(w, h);
    for (double& v : img.MutableData()) {
        v = rng.Uniform(lo, hi);
    }
    return img;
}

} // namespace

TEST_CASE("HOG block of a vertical ramp votes only into the 90 degree bin") {
    // I = a*y: central differences give 2a inside, a on the clamped top and bottom rows.
    const double a = 0.01;
    const Eigen::VectorXd h = HogBlock(Ramp(10, 8, 0.0, a));
    REQUIRE(h.size() == 36);
    // Each 5x4 cell collects 5 * (a + 2a + 2a + 2a) = 35a in bin 4; all four cells are equal.
    for (int cell = 0; cell < 4; ++cell) {
        for (int b = 0; b < 9; ++b) {
            if (b == 4) {
                CHECK(h[cell * 9 + b] == doctest::Approx(35 * a / std::sqrt(4 * 35 * a * 35 * a + 1e-12)));
            } else {
                CHECK(h[cell * 9 + b] == 0.0);
            }
        }
    }
}

TEST_CASE("HOG splits a horizontal gradient evenly across the wrap-around bins") {
    // 0 degrees sits midway between the bins centred at 170 and 10 degrees.
    const Eigen::VectorXd h = HogBlock(Ramp(10, 8, 0.01, 0.0));
    for (int cell = 0; cell < 4; ++cell) {
        CHECK(h[cell * 9 + 0] > 0.0);
        CHECK(h[cell * 9 + 0] == doctest::Approx(h[cell * 9 + 8]).epsilon(1e-12));
        for (int b = 1; b < 8; ++b) {
            CHECK(h[cell * 9 + b] == 0.0);
        }
    }
    CHECK(h.norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("HOG block is invariant to brightness offset") {
    GrayImage a = RandomImage(10, 8, 3, 0.2, 0.6);
    GrayImage b = a;
    for (double& v : b.MutableData()) {
        v += 0.25;
    }
    CHECK((HogBlock(a) - HogBlock(b)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(HogBlock(GrayImage(9, 8)), ParameterError);
}

TEST_CASE("A-HOG concatenates 36 blocks and ignores the two rightmost columns") {
    const GrayImage img = RandomImage(62, 48, 8);
    const Descriptor d = Ahog(img);
    REQUIRE(d.values.size() == kAhogDimension);
    CHECK(d.kind == DescriptorKind::AHOG);
    for (int by = 0; by < 6; ++by) {
        for (int bx = 0; bx < 6; ++bx) {
            const Eigen::VectorXd expect = HogBlock(img.Crop({bx * 10, by * 8, 10, 8}));
            CHECK((d.values.segment((by * 6 + bx) * 36, 36) - expect).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    GrayImage edited = img;
    for (int y = 0; y < 48; ++y) {
        edited(60, y) = 0.0;
        edited(61, y) = 1.0;
    }
    CHECK(Ahog(edited).values == d.values);
    edited = img;
    edited(3, 47) = 1.0 - img(3, 47);
    CHECK_FALSE(Ahog(edited).values == d.values);
    CHECK_THROWS_AS(Ahog(GrayImage(62, 49)), ParameterError);
}

TEST_CASE("SIFT patch of a horizontal ramp votes only into orientation 0") {
    const Eigen::VectorXd s = SiftPatch(Ramp(16, 16, 0.02, 0.0), 0, 0);
    REQUIRE(s.size() == kSiftDimension);
    for (int i = 0; i < 128; ++i) {
        if (i % 8 != 0) {
            CHECK(s[i] == 0.0);
        }
    }
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd flipped = SiftPatch(Ramp(16, 16, -0.02, 0.0, 0.9), 0, 0);
    for (int i = 0; i < 128; ++i) {
        CHECK(flipped[i] == doctest::Approx(i % 8 == 4 ? s[i - 4] : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("SIFT is contrast invariant and zero on flat patches") {
    GrayImage a = RandomImage(16, 16, 4, 0.3, 0.5);
    GrayImage b = a;
    for (double& v : b.MutableData()) {
        v = 0.1 + 1.5 * (v - 0.3);
    }
    CHECK((SiftPatch(a, 0, 0) - SiftPatch(b, 0, 0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(SiftPatch(GrayImage(16, 16, 0.5), 0, 0).isZero(0.0));
}

TEST_CASE("Dense SIFT yields three patches at offsets 0, 2 and 4") {
    const GrayImage img = RandomImage(20, 16, 12);
    const auto ds = DenseSift(img);
    REQUIRE(ds.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(ds[k].origin == Rect{2 * k, 0, 16, 16});
        CHECK((ds[k].values - SiftPatch(img.Crop({2 * k - 1, -1, 18, 18}), 1, 1)).cwiseAbs().maxCoeff() == 0.0);
    }
    segment::Primitive p;
    p.pixels = img;
    p.bounds = {40, 30, 20, 16};
    const auto shifted = DenseSift(p);
    CHECK(shifted[2].origin == Rect{44, 30, 16, 16});
    CHECK_THROWS_AS(DenseSift(GrayImage(16, 16)), ParameterError);
}

TEST_CASE("Descriptor dimensions hold over a generated image") {
    const auto s = synth::GenerateFabric(synth::FabricSpec{});
    const auto smoothed = imaging::GaussianSmooth(s.image, segment::SegmentationParams{}.smoothing);
    for (const auto& sr : segment::SegmentRule1(smoothed)) {
        CHECK(Ahog(sr).values.size() == 1296);
        for (const auto& p : segment::SegmentRule2(sr)) {
            const auto ds = DenseSift(p);
            CHECK(ds.size() == 3);
            for (const auto& d : ds) {
                CHECK(d.values.size() == 128);
            }
        }
    }
}
