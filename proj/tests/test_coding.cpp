/**
 * @file test_coding.cpp
 * @brief K-Means, the assignment family and LCRE against independent oracles
 */

#include <doctest.h>

#include <czi/coding/Coding.h>
#include <czi/coding/KMeans.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>

#include "LagrangeOracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace czi;
using namespace czi::coding;
using namespace czi::testing;

namespace {

Codebook RandomCodebook(Rng& rng, int m, int d) {
    Codebook cb;
    cb.words.resize(m, d);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) {
            cb.words(i, j) = rng.Normal();
        }
    }
    return cb;
}

Eigen::VectorXd RandomVector(Rng& rng, int d, double scale = 1.0) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) {
        x(j) = scale * rng.Normal();
    }
    return x;
}

Codebook FromRows(std::initializer_list<std::initializer_list<double>> rows) {
    Codebook cb;
    cb.words.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (double v : r) {
            cb.words(i, j++) = v;
        }
        ++i;
    }
    return cb;
}

double Residual(const Eigen::VectorXd& x, const Codebook& cb, const Eigen::VectorXd& c) {
    return (x - cb.words.transpose() * c).norm();
}

} // namespace

TEST_CASE("Hard assignment picks the nearest word with lowest-index ties") {
    const Codebook cb = FromRows({{1, 0}, {0, 2}, {-1, 0}});
    CodeVector c = HardAssign(Eigen::Vector2d(0, 2), cb);
    CHECK(c.support == std::vector<int>{1});
    CHECK(c.coefficients(1) == 1.0);
    c = HardAssign(Eigen::Vector2d(0, 0), cb);
    CHECK(c.support == std::vector<int>{0});

    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const Codebook r = RandomCodebook(rng, 7, 4);
        const Eigen::VectorXd x = RandomVector(rng, 4);
        int best = 0;
        for (int j = 1; j < 7; ++j) {
            if ((r.words.row(j).transpose() - x).squaredNorm() < (r.words.row(best).transpose() - x).squaredNorm()) {
                best = j;
            }
        }
        CHECK(HardAssign(x, r).support == std::vector<int>{best});
    }
    CHECK_THROWS_AS(HardAssign(Eigen::Vector3d(0, 0, 0), cb), ParameterError);
}

TEST_CASE("Soft assignment matches extended-precision evaluation") {
    const Codebook one = FromRows({{0.3, 0.4}});
    CHECK(SoftAssign(Eigen::Vector2d(5, 5), one, 1.0).coefficients(0) == 1.0);
    const Codebook two = FromRows({{1, 0}, {-1, 0}});
    const CodeVector half = SoftAssign(Eigen::Vector2d(0, 3), two, 2.0);
    CHECK(half.coefficients(0) == 0.5);
    CHECK(half.coefficients(1) == 0.5);

    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const Codebook cb = RandomCodebook(rng, 6, 5);
        const Eigen::VectorXd x = RandomVector(rng, 5);
        const double beta = 0.1 + rng.Uniform01();
        long double denom = 0.0L;
        std::vector<long double> num(6);
        for (int j = 0; j < 6; ++j) {
            long double d2 = 0.0L;
            for (int d = 0; d < 5; ++d) {
                const long double t = static_cast<long double>(x(d)) - cb.words(j, d);
                d2 += t * t;
            }
            num[j] = std::exp(-static_cast<long double>(beta) * d2);
            denom += num[j];
        }
        const CodeVector c = SoftAssign(x, cb, beta);
        for (int j = 0; j < 6; ++j) {
            CHECK(std::fabs(static_cast<long double>(c.coefficients(j)) - num[j] / denom) < 1e-10L);
        }
    }
    CHECK_THROWS_AS(SoftAssign(Eigen::Vector2d(0, 0), two, 0.0), ParameterError);
}

TEST_CASE("Soft assignment survives exponent underflow") {
    const Codebook cb = FromRows({{100, 0}, {101, 0}});
    const CodeVector c = SoftAssign(Eigen::Vector2d(0, 0), cb, 10.0);
    CHECK(std::isfinite(c.coefficients(0)));
    CHECK(c.coefficients.sum() == doctest::Approx(1.0));
    CHECK(c.coefficients(0) == 1.0);
}

TEST_CASE("LSC reduces to soft and hard assignment and matches a sort-based oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Codebook cb = RandomCodebook(rng, 8, 3);
        const Eigen::VectorXd x = RandomVector(rng, 3);
        CHECK(LscAssign(x, cb, 1.5, 8).coefficients == SoftAssign(x, cb, 1.5).coefficients);
        CHECK(LscAssign(x, cb, 1.5, 1).support == HardAssign(x, cb).support);

        const std::vector<int> order = SortedByDistance(x, cb);
        std::vector<double> w(8, 0.0);
        double total = 0.0;
        for (int i = 0; i < 3; ++i) {
            const int j = order[i];
            w[j] = std::exp(-1.5 * (cb.words.row(j).transpose() - x).squaredNorm());
            total += w[j];
        }
        const CodeVector c = LscAssign(x, cb, 1.5, 3);
        for (int j = 0; j < 8; ++j) {
            CHECK(c.coefficients(j) == doctest::Approx(w[j] / total).epsilon(1e-12));
        }
        CHECK(c.support.size() == 3);
    }
    const Codebook cb = RandomCodebook(rng, 4, 2);
    CHECK_THROWS_AS(LscAssign(Eigen::Vector2d(0, 0), cb, 1.0, 5), ParameterError);
    CHECK_THROWS_AS(LscAssign(Eigen::Vector2d(0, 0), cb, 1.0, 0), ParameterError);
}

TEST_CASE("Approximated LLC on the symmetric two-word example") {
    const Codebook cb = FromRows({{1, 0}, {-1, 0}, {5, 5}});
    const CodeVector c = LlcApprox(Eigen::Vector2d(0, 0), cb, 2, 1e-4);
    CHECK(c.coefficients(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.coefficients(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.coefficients(2) == 0.0);
    CHECK(Residual(Eigen::Vector2d(0, 0), cb, c.coefficients) < 1e-12);
}

TEST_CASE("Approximated LLC returns the indicator when x is a basis") {
    const Codebook cb = FromRows({{1, 0}, {0, 1}, {2, 2}});
    for (double lambda : {0.0, 1e-4}) {
        const CodeVector c = LlcApprox(Eigen::Vector2d(0, 1), cb, 3, lambda);
        CHECK(c.support == std::vector<int>{1});
        CHECK(c.coefficients(1) == 1.0);
        CHECK(Residual(Eigen::Vector2d(0, 1), cb, c.coefficients) == 0.0);
    }
}

TEST_CASE("Approximated LLC matches the Lagrange oracle") {
    Rng rng(4);
    const double lambda = 1e-4;
    for (int trial = 0; trial < 200; ++trial) {
        const Codebook cb = RandomCodebook(rng, 6, 5);
        const Eigen::VectorXd x = RandomVector(rng, 5);
        const CodeVector c = LlcApprox(x, cb, 3, lambda);
        std::vector<int> idx = SortedByDistance(x, cb);
        idx.resize(3);
        LMat a = Covariance(x, cb, idx);
        const long double ridge = lambda * (a[0][0] + a[1][1] + a[2][2]) / 3.0L;
        for (int i = 0; i < 3; ++i) {
            a[i][i] += ridge;
        }
        const auto oracle = KktSolve(a);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::fabs(c.coefficients(idx[i]) - static_cast<double>(oracle[i])) < 1e-8);
        }
        CHECK(std::abs(c.coefficients.sum() - 1.0) < 1e-9);
        CHECK(Residual(x, cb, c.coefficients) <= Residual(x, cb, HardAssign(x, cb).coefficients) + 1e-12);
    }
}

TEST_CASE("Full LLC reduces to unregularised constrained least squares at lambda 0") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Codebook cb = RandomCodebook(rng, 4, 6);
        const Eigen::VectorXd x = RandomVector(rng, 6);
        const CodeVector c = LlcFull(x, cb, 0.0, 1.0);
        const auto oracle = KktSolve(Covariance(x, cb, {0, 1, 2, 3}));
        for (int j = 0; j < 4; ++j) {
            CHECK(std::fabs(c.coefficients(j) - static_cast<double>(oracle[j])) < 1e-8);
        }
    }
}

TEST_CASE("Full LLC with a dominant locality term shrinks far words") {
    Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const Codebook cb = RandomCodebook(rng, 5, 3);
        const Eigen::VectorXd x = RandomVector(rng, 3);
        const CodeVector c = LlcFull(x, cb, 1e8, 1.0);
        const std::vector<int> order = SortedByDistance(x, cb);
        for (size_t i = 1; i < order.size(); ++i) {
            CHECK(std::abs(c.coefficients(order[i - 1])) >= std::abs(c.coefficients(order[i])));
        }
    }
}

TEST_CASE("Full LLC objective never exceeds that of the approximated code") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const Codebook cb = RandomCodebook(rng, 8, 5);
        const Eigen::VectorXd x = RandomVector(rng, 5);
        const double lambda = 1e-4 * std::pow(10.0, rng.Uniform(0.0, 4.0));
        const CodeVector full = LlcFull(x, cb, lambda, 1.0);
        const CodeVector approx = LlcApprox(x, cb, 3, 1e-4);
        CHECK(std::abs(full.coefficients.sum() - 1.0) < 1e-9);
        CHECK(LlcObjective(x, cb, full.coefficients, lambda, 1.0) <=
              LlcObjective(x, cb, approx.coefficients, lambda, 1.0) + 1e-12);
    }
}

TEST_CASE("RLC encodes exact words, rejects far inputs and agrees with LLC inside a generous scope") {
    const Codebook cb = FromRows({{0, 0}, {1, 0}, {0, 1}});
    auto hit = RlcAssign(Eigen::Vector2d(1, 0), cb, 3, 0.01);
    REQUIRE(std::holds_alternative<RlcCode>(hit));
    CHECK(std::get<RlcCode>(hit).nearest == 1);
    CHECK(std::get<RlcCode>(hit).code.coefficients(1) == 1.0);

    auto miss = RlcAssign(Eigen::Vector2d(3, 4), cb, 3, 1.0);
    REQUIRE(std::holds_alternative<OutOfScope>(miss));
    CHECK(std::get<OutOfScope>(miss).distance == doctest::Approx(std::sqrt(18.0)));

    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const Codebook r = RandomCodebook(rng, 6, 4);
        const Eigen::VectorXd x = RandomVector(rng, 4);
        const auto res = RlcAssign(x, r, 3, 1e6);
        REQUIRE(std::holds_alternative<RlcCode>(res));
        const CodeVector ref = LlcApprox(x, r, 3, 1e-4);
        CHECK(std::get<RlcCode>(res).code.support == ref.support);
        CHECK((std::get<RlcCode>(res).code.coefficients - ref.coefficients).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("RLC never selects a word outside the scope") {
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        const Codebook cb = RandomCodebook(rng, 6, 3);
        const Eigen::VectorXd x = RandomVector(rng, 3);
        const double rho = rng.Uniform(0.2, 3.0);
        const auto res = RlcAssign(x, cb, 3, rho);
        if (const auto* code = std::get_if<RlcCode>(&res)) {
            for (int j : code->code.support) {
                CHECK((cb.words.row(j).transpose() - x).norm() < rho);
            }
            CHECK(std::abs(code->code.coefficients.sum() - 1.0) < 1e-9);
        } else {
            double dmin = 1e300;
            for (int j = 0; j < 6; ++j) {
                dmin = std::min(dmin, (cb.words.row(j).transpose() - x).norm());
            }
            CHECK(dmin >= rho);
            CHECK(std::get<OutOfScope>(res).distance == doctest::Approx(dmin).epsilon(1e-14));
        }
    }
}

TEST_CASE("LCRE trivial cases and naive double-sum oracle") {
    const Codebook cb = FromRows({{0, 0}, {1, 0}, {0, 1}});
    std::vector<Eigen::VectorXd> exact = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)};
    CHECK(Lcre(exact, cb, 1.0, 1, LcreMode::WeightedDistance) == 0.0);
    CHECK(Lcre(exact, cb, 1.0, 1, LcreMode::Eq9Literal) == 2.0);
    std::vector<Eigen::VectorXd> single = {Eigen::Vector2d(0.3, 2.0)};
    CHECK(Lcre(single, cb, 1.0, 1, LcreMode::WeightedDistance) == doctest::Approx(0.09 + 1.0));
    CHECK_THROWS_AS(Lcre(std::vector<Eigen::VectorXd>{}, cb, 1.0, 1, LcreMode::WeightedDistance), ParameterError);

    Rng rng(10);
    for (int trial = 0; trial < 30; ++trial) {
        const Codebook r = RandomCodebook(rng, 7, 4);
        std::vector<Eigen::VectorXd> batch;
        for (int i = 0; i < 5; ++i) {
            batch.push_back(RandomVector(rng, 4));
        }
        double wd = 0.0;
        double lit = 0.0;
        for (const auto& x : batch) {
            const std::vector<int> order = SortedByDistance(x, r);
            double z = 0.0;
            for (int i = 0; i < 3; ++i) {
                z += std::exp(-0.7 * (r.words.row(order[i]).transpose() - x).squaredNorm());
            }
            for (int i = 0; i < 3; ++i) {
                const double d2 = (r.words.row(order[i]).transpose() - x).squaredNorm();
                const double c = std::exp(-0.7 * d2) / z;
                wd += c * d2;
                lit += c * std::exp(-0.7 * d2);
            }
        }
        CHECK(Lcre(batch, r, 0.7, 3, LcreMode::WeightedDistance) == doctest::Approx(wd).epsilon(1e-10));
        CHECK(Lcre(batch, r, 0.7, 3, LcreMode::Eq9Literal) == doctest::Approx(lit).epsilon(1e-10));
    }
}

TEST_CASE("Weighted-distance LCRE grows as a descriptor moves away from its neighbourhood") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Codebook cb = RandomCodebook(rng, 6, 3);
        const Eigen::VectorXd centroid = cb.words.colwise().mean().transpose();
        const Eigen::VectorXd dir = RandomVector(rng, 3).normalized();
        double prev = -1.0;
        for (double t = 5.0; t < 30.0; t += 1.0) {
            const std::vector<Eigen::VectorXd> batch = {centroid + t * dir};
            const double e = Lcre(batch, cb, 1.0, 3, LcreMode::WeightedDistance);
            CHECK(e >= prev);
            prev = e;
        }
    }
}

TEST_CASE("LCRE mode names round trip") {
    CHECK(ParseLcreMode(ToString(LcreMode::WeightedDistance)) == LcreMode::WeightedDistance);
    CHECK(ParseLcreMode(ToString(LcreMode::Eq9Literal)) == LcreMode::Eq9Literal);
    CHECK_THROWS_AS(ParseLcreMode("literal"), ParameterError);
}

TEST_CASE("K-Means trivial regimes") {
    Rng rng(12);
    Eigen::MatrixXd data(20, 3);
    for (int i = 0; i < 20; ++i) {
        data.row(i) = RandomVector(rng, 3).transpose();
    }
    const KMeansResult one = KMeans(data, 1, 1);
    CHECK((one.centers.row(0) - data.colwise().mean()).cwiseAbs().maxCoeff() < 1e-15);

    const KMeansResult all = KMeans(data, 20, 1);
    CHECK(all.sseHistory.back() == 0.0);

    CHECK_THROWS_AS(KMeans(data, 21, 1), ParameterError);
}

TEST_CASE("K-Means finds the means of two separated clouds") {
    Rng rng(13);
    Eigen::MatrixXd data(200, 2);
    Eigen::Vector2d meanA = Eigen::Vector2d::Zero();
    Eigen::Vector2d meanB = Eigen::Vector2d::Zero();
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector2d p = (i < 100 ? Eigen::Vector2d(-10, 0) : Eigen::Vector2d(10, 5)) + RandomVector(rng, 2);
        data.row(i) = p.transpose();
        (i < 100 ? meanA : meanB) += p / 100.0;
    }
    const KMeansResult r = KMeans(data, 2, 99);
    const int a = r.centers(0, 0) < 0 ? 0 : 1;
    CHECK((r.centers.row(a).transpose() - meanA).norm() < 1e-6);
    CHECK((r.centers.row(1 - a).transpose() - meanB).norm() < 1e-6);
}

TEST_CASE("K-Means SSE is non-increasing and runs are reproducible") {
    Rng rng(14);
    Eigen::MatrixXd data(300, 4);
    for (int i = 0; i < 300; ++i) {
        data.row(i) = RandomVector(rng, 4).transpose();
    }
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const KMeansResult r = KMeans(data, 8, seed);
        for (size_t i = 1; i < r.sseHistory.size(); ++i) {
            CHECK(r.sseHistory[i] <= r.sseHistory[i - 1] + 1e-9);
        }
        const KMeansResult again = KMeans(data, 8, seed);
        CHECK(again.centers == r.centers);
        CHECK(again.assignment == r.assignment);
    }
}

TEST_CASE("K-Means handles duplicated points") {
    Eigen::MatrixXd data(6, 2);
    data << 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2;
    const KMeansResult r = KMeans(data, 3, 5);
    CHECK(r.centers.allFinite());
    CHECK(r.sseHistory.back() == 0.0);
}

TEST_CASE("Codebook JSON round trip is exact") {
    Rng rng(15);
    Codebook cb = RandomCodebook(rng, 4, 3);
    cb.flavor = CodebookFlavor::NumberEmbedding;
    cb.numbering = {3, 1, 4, 2};
    cb.seed = 77;
    const Codebook back = CodebookFromJson(nlohmann::json::parse(CodebookToJson(cb).dump()));
    CHECK(back.words == cb.words);
    CHECK(back.numbering == cb.numbering);
    CHECK(back.seed == 77);
    CHECK(back.flavor == CodebookFlavor::NumberEmbedding);

    Codebook label = RandomCodebook(rng, 2, 2);
    label.sizeLh = 64;
    label.sizeLv = 49;
    label.subregionKind = SubRegionKind::Subregion2;
    const Codebook lb = CodebookFromJson(CodebookToJson(label));
    CHECK(lb.sizeLh == 64);
    CHECK(lb.subregionKind == SubRegionKind::Subregion2);

    cb.numbering = {1, 1, 2, 3};
    CHECK_THROWS_AS(CodebookToJson(cb), DataError);
    CHECK_THROWS_AS(CodebookFromJson(nlohmann::json{{"format", "other"}}), DataError);
}
