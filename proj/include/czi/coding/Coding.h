/**
 * @file Coding.h
 * @brief Coding of a descriptor against a codebook
 *
 * All distances are Euclidean; ties between equally distant words resolve to
 * the lower word index everywhere.
 */

#pragma once

#include <czi/coding/Codebook.h>

#include <Eigen/Core>

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace czi::coding {

struct CodingParams {
    double beta = 1.0;      ///< softness of the kernel exp(-beta * d^2)
    int k = 3;              ///< neighbourhood size
    double lambda = 1e-4;   ///< LLC regularizer
    double sigma = 1.0;     ///< LLC locality decay
    double rho = 1.0;       ///< RLC scope radius
};

/// Throws ParameterError unless beta > 0, 1 <= k <= m, lambda >= 0, sigma > 0, rho > 0.
void ValidateParams(const CodingParams& params, int m);

/// Length-M coefficient vector plus the indices of its nonzeros (ascending).
struct CodeVector {
    Eigen::VectorXd coefficients;
    std::vector<int> support;
};

/// Squared distances from x to every word.
Eigen::VectorXd SquaredDistances(const Eigen::VectorXd& x, const Codebook& cb);

/// Indices of the k nearest words, nearest first.
std::vector<int> NearestWords(const Eigen::VectorXd& squaredDistances, int k);

/// Indicator on the nearest word.
CodeVector HardAssign(const Eigen::VectorXd& x, const Codebook& cb);

/// Gaussian-kernel memberships over all words (exponent shifted by the minimum).
CodeVector SoftAssign(const Eigen::VectorXd& x, const Codebook& cb, double beta);

/// Kernel memberships restricted to the k nearest words.
CodeVector LscAssign(const Eigen::VectorXd& x, const Codebook& cb, double beta, int k);

/**
 * @brief Approximated LLC over the k nearest words.
 *
 * Solves (C + lambda * tr(C)/k * I) c = 1 with C the k x k covariance of the
 * shifted neighbours (b_j - x), then rescales c to sum to one. When x equals a
 * neighbour exactly, the zero-residual indicator on that neighbour is returned.
 * Throws NumericalError if the system stays singular.
 */
CodeVector LlcApprox(const Eigen::VectorXd& x, const Codebook& cb, int k, double lambda);

/// LLC on an explicit neighbour list (shared by LlcApprox and RlcAssign).
CodeVector LlcOnSupport(const Eigen::VectorXd& x, const Codebook& cb, const std::vector<int>& support, double lambda);

/**
 * @brief Full LLC with the locality adaptor over all M words.
 *
 * d_j = exp(dist_j / max_dist / sigma); solves (C + lambda * diag(d^2)) c = 1
 * and rescales to sum to one.
 */
CodeVector LlcFull(const Eigen::VectorXd& x, const Codebook& cb, double lambda, double sigma);

/// Value of |x - Bc|^2 + lambda * |d . c|^2 with the locality adaptor of LlcFull.
double LlcObjective(const Eigen::VectorXd& x, const Codebook& cb, const Eigen::VectorXd& c, double lambda,
                    double sigma);

struct RlcCode {
    CodeVector code;
    int nearest = 0;              ///< nearest in-scope word index
    double nearestDistance = 0.0;
};

/// No word lies strictly inside the scope; carries the smallest distance.
struct OutOfScope {
    double distance = 0.0;
};

using RlcResult = std::variant<RlcCode, OutOfScope>;

/**
 * @brief Restrictive LLC: only words with distance < rho may encode x.
 *
 * Uses the min(k, |scope|) nearest in-scope words with LlcOnSupport.
 */
RlcResult RlcAssign(const Eigen::VectorXd& x, const Codebook& cb, int k, double rho, double lambda = 1e-4);

enum class LcreMode {
    WeightedDistance, ///< sum of c_ij * |x_i - b_j|^2; grows with defect severity
    Eq9Literal        ///< sum of c_ij * exp(-beta |x_i - b_j|^2); shrinks with defect severity
};

const char* ToString(LcreMode mode);
LcreMode ParseLcreMode(const std::string& name);

/// Locality-constrained reconstruction error over a descriptor batch using LSC weights.
double Lcre(std::span<const Eigen::VectorXd> descriptors, const Codebook& cb, double beta, int k, LcreMode mode);

} // namespace czi::coding
