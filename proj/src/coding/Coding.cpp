/**
 * @file Coding.cpp
 */

#include <czi/coding/Coding.h>
#include <czi/core/Error.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace czi::coding {

namespace {

void CheckDimension(const Eigen::VectorXd& x, const Codebook& cb) {
    if (cb.Size() < 1) {
        throw ParameterError("codebook is empty");
    }
    if (x.size() != cb.words.cols()) {
        throw ParameterError("descriptor dimension " + std::to_string(x.size()) + " does not match codebook dimension " +
                             std::to_string(cb.words.cols()));
    }
}

void CheckBeta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ParameterError("beta must be positive");
    }
}

void CheckK(int k, int m) {
    if (k < 1 || k > m) {
        throw ParameterError("neighbourhood size k=" + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
    }
}

CodeVector Indicator(int m, int j) {
    CodeVector out;
    out.coefficients = Eigen::VectorXd::Zero(m);
    out.coefficients(j) = 1.0;
    out.support = {j};
    return out;
}

/// Kernel weights over @p idx, shifted by the smallest distance so the largest term is exp(0).
CodeVector KernelWeights(const Eigen::VectorXd& d2, std::vector<int> idx, double beta) {
    std::sort(idx.begin(), idx.end());
    double dmin = d2(idx.front());
    for (int j : idx) {
        dmin = std::min(dmin, d2(j));
    }
    CodeVector out;
    out.coefficients = Eigen::VectorXd::Zero(d2.size());
    double total = 0.0;
    for (int j : idx) {
        const double w = std::exp(-beta * (d2(j) - dmin));
        out.coefficients(j) = w;
        total += w;
    }
    out.coefficients /= total;
    for (int j = 0; j < d2.size(); ++j) {
        if (out.coefficients(j) != 0.0) {
            out.support.push_back(j);
        }
    }
    return out;
}

/// Solves A c = 1 and rescales c to sum to one.
Eigen::VectorXd SolveAffine(const Eigen::MatrixXd& a) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        throw NumericalError("LLC system is singular");
    }
    Eigen::VectorXd c = lu.solve(Eigen::VectorXd::Ones(a.rows()));
    const double s = c.sum();
    if (!std::isfinite(s) || std::abs(s) < 1e-300) {
        throw NumericalError("LLC solution cannot be normalised");
    }
    c /= s;
    if (!c.allFinite()) {
        throw NumericalError("LLC solution is not finite");
    }
    return c;
}

CodeVector Scatter(int m, const std::vector<int>& support, const Eigen::VectorXd& c) {
    CodeVector out;
    out.coefficients = Eigen::VectorXd::Zero(m);
    for (size_t i = 0; i < support.size(); ++i) {
        out.coefficients(support[i]) = c(static_cast<Eigen::Index>(i));
    }
    out.support = support;
    std::sort(out.support.begin(), out.support.end());
    return out;
}

Eigen::VectorXd LocalityAdaptor(const Eigen::VectorXd& d2, double sigma) {
    const Eigen::VectorXd dist = d2.cwiseSqrt();
    const double maxDist = dist.maxCoeff();
    Eigen::VectorXd adaptor(dist.size());
    for (Eigen::Index j = 0; j < dist.size(); ++j) {
        const double normalised = maxDist > 0.0 ? dist(j) / maxDist : 0.0;
        adaptor(j) = std::exp(normalised / sigma);
    }
    return adaptor;
}

} // namespace

void ValidateParams(const CodingParams& params, int m) {
    CheckBeta(params.beta);
    CheckK(params.k, m);
    if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
        throw ParameterError("lambda must be non-negative");
    }
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
        throw ParameterError("sigma must be positive");
    }
    if (!(params.rho > 0.0)) {
        throw ParameterError("rho must be positive");
    }
}

Eigen::VectorXd SquaredDistances(const Eigen::VectorXd& x, const Codebook& cb) {
    CheckDimension(x, cb);
    return (cb.words.rowwise() - x.transpose()).rowwise().squaredNorm();
}

std::vector<int> NearestWords(const Eigen::VectorXd& squaredDistances, int k) {
    const int m = static_cast<int>(squaredDistances.size());
    CheckK(k, m);
    std::vector<int> idx(static_cast<size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
        const double da = squaredDistances(a);
        const double db = squaredDistances(b);
        return da < db || (da == db && a < b);
    });
    idx.resize(static_cast<size_t>(k));
    return idx;
}

CodeVector HardAssign(const Eigen::VectorXd& x, const Codebook& cb) {
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    return Indicator(cb.Size(), NearestWords(d2, 1).front());
}

CodeVector SoftAssign(const Eigen::VectorXd& x, const Codebook& cb, double beta) {
    CheckBeta(beta);
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    std::vector<int> all(static_cast<size_t>(cb.Size()));
    std::iota(all.begin(), all.end(), 0);
    return KernelWeights(d2, all, beta);
}

CodeVector LscAssign(const Eigen::VectorXd& x, const Codebook& cb, double beta, int k) {
    CheckBeta(beta);
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    return KernelWeights(d2, NearestWords(d2, k), beta);
}

CodeVector LlcOnSupport(const Eigen::VectorXd& x, const Codebook& cb, const std::vector<int>& support, double lambda) {
    CheckDimension(x, cb);
    if (support.empty()) {
        throw ParameterError("LLC needs at least one basis");
    }
    if (!(lambda >= 0.0)) {
        throw ParameterError("lambda must be non-negative");
    }
    const int k = static_cast<int>(support.size());
    Eigen::MatrixXd shifted(k, x.size());
    for (int i = 0; i < k; ++i) {
        shifted.row(i) = cb.words.row(support[static_cast<size_t>(i)]) - x.transpose();
    }
    if (k == 1) {
        return Scatter(cb.Size(), support, Eigen::VectorXd::Ones(1));
    }
    // An exact hit on a basis is encoded by that basis alone (zero residual).
    for (int i = 0; i < k; ++i) {
        if (shifted.row(i).squaredNorm() == 0.0) {
            return Indicator(cb.Size(), support[static_cast<size_t>(i)]);
        }
    }
    Eigen::MatrixXd cov = shifted * shifted.transpose();
    const double trace = cov.trace();
    cov.diagonal().array() += lambda * trace / k;
    return Scatter(cb.Size(), support, SolveAffine(cov));
}

CodeVector LlcApprox(const Eigen::VectorXd& x, const Codebook& cb, int k, double lambda) {
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    return LlcOnSupport(x, cb, NearestWords(d2, k), lambda);
}

CodeVector LlcFull(const Eigen::VectorXd& x, const Codebook& cb, double lambda, double sigma) {
    if (!(lambda >= 0.0)) {
        throw ParameterError("lambda must be non-negative");
    }
    if (!(sigma > 0.0)) {
        throw ParameterError("sigma must be positive");
    }
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    const int m = cb.Size();
    if (lambda == 0.0) {
        for (int j = 0; j < m; ++j) {
            if (d2(j) == 0.0) {
                return Indicator(m, j);
            }
        }
    }
    const Eigen::MatrixXd shifted = cb.words.rowwise() - x.transpose();
    Eigen::MatrixXd system = shifted * shifted.transpose();
    const Eigen::VectorXd adaptor = LocalityAdaptor(d2, sigma);
    system.diagonal() += lambda * adaptor.cwiseAbs2();
    std::vector<int> all(static_cast<size_t>(m));
    std::iota(all.begin(), all.end(), 0);
    return Scatter(m, all, SolveAffine(system));
}

double LlcObjective(const Eigen::VectorXd& x, const Codebook& cb, const Eigen::VectorXd& c, double lambda,
                    double sigma) {
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    const Eigen::VectorXd adaptor = LocalityAdaptor(d2, sigma);
    const Eigen::VectorXd residual = x - cb.words.transpose() * c;
    return residual.squaredNorm() + lambda * adaptor.cwiseProduct(c).squaredNorm();
}

RlcResult RlcAssign(const Eigen::VectorXd& x, const Codebook& cb, int k, double rho, double lambda) {
    if (!(rho > 0.0)) {
        throw ParameterError("rho must be positive");
    }
    CheckK(k, cb.Size());
    const Eigen::VectorXd d2 = SquaredDistances(x, cb);
    const std::vector<int> order = NearestWords(d2, cb.Size());
    std::vector<int> valid;
    for (int j : order) {
        if (std::sqrt(d2(j)) < rho && static_cast<int>(valid.size()) < k) {
            valid.push_back(j);
        }
    }
    if (valid.empty()) {
        return OutOfScope{std::sqrt(d2(order.front()))};
    }
    RlcCode out;
    out.nearest = valid.front();
    out.nearestDistance = std::sqrt(d2(valid.front()));
    out.code = LlcOnSupport(x, cb, valid, lambda);
    return out;
}

const char* ToString(LcreMode mode) {
    return mode == LcreMode::WeightedDistance ? "weighted-distance" : "eq9-literal";
}

LcreMode ParseLcreMode(const std::string& name) {
    if (name == "weighted-distance") {
        return LcreMode::WeightedDistance;
    }
    if (name == "eq9-literal") {
        return LcreMode::Eq9Literal;
    }
    throw ParameterError("unknown LCRE mode '" + name + "' (expected weighted-distance or eq9-literal)");
}

double Lcre(std::span<const Eigen::VectorXd> descriptors, const Codebook& cb, double beta, int k, LcreMode mode) {
    if (descriptors.empty()) {
        throw ParameterError("LCRE needs at least one descriptor");
    }
    CheckBeta(beta);
    CheckK(k, cb.Size());
    double total = 0.0;
    for (const Eigen::VectorXd& x : descriptors) {
        const Eigen::VectorXd d2 = SquaredDistances(x, cb);
        const CodeVector c = KernelWeights(d2, NearestWords(d2, k), beta);
        for (int j : c.support) {
            const double term = mode == LcreMode::WeightedDistance ? d2(j) : std::exp(-beta * d2(j));
            total += c.coefficients(j) * term;
        }
    }
    return total;
}

} // namespace czi::coding
