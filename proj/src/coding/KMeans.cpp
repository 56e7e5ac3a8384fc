/**
 * @file KMeans.cpp
 */

#include <czi/coding/KMeans.h>
#include <czi/core/Error.h>
#include <czi/core/Random.h>

#include <limits>
#include <string>

namespace czi::coding {

namespace {

/// Nearest centre for each row; returns SSE. Ties go to the lower centre index.
double AssignAll(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centers, std::vector<int>& assignment,
                 std::vector<double>& cost) {
    double sse = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        int best = 0;
        double bestD = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < centers.rows(); ++c) {
            const double d = (data.row(i) - centers.row(c)).squaredNorm();
            if (d < bestD) {
                bestD = d;
                best = static_cast<int>(c);
            }
        }
        assignment[static_cast<size_t>(i)] = best;
        cost[static_cast<size_t>(i)] = bestD;
        sse += bestD;
    }
    return sse;
}

Eigen::MatrixXd SeedPlusPlus(const Eigen::MatrixXd& data, int m, Rng& rng) {
    const Eigen::Index n = data.rows();
    Eigen::MatrixXd centers(m, data.cols());
    std::vector<bool> chosen(static_cast<size_t>(n), false);
    Eigen::Index first = static_cast<Eigen::Index>(rng.Index(static_cast<uint64_t>(n)));
    centers.row(0) = data.row(first);
    chosen[static_cast<size_t>(first)] = true;

    Eigen::VectorXd nearest(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        nearest(i) = (data.row(i) - centers.row(0)).squaredNorm();
    }
    for (int c = 1; c < m; ++c) {
        const double total = nearest.sum();
        Eigen::Index pick = -1;
        if (total > 0.0) {
            const double target = rng.Uniform01() * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += nearest(i);
                if (nearest(i) > 0.0 && acc > target) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {
                // Rounding left target at the very top; take the last positive-weight point.
                for (Eigen::Index i = n - 1; i >= 0; --i) {
                    if (nearest(i) > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // Every point coincides with a centre: take the first unused row.
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!chosen[static_cast<size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(c) = data.row(pick);
        chosen[static_cast<size_t>(pick)] = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            nearest(i) = std::min(nearest(i), (data.row(i) - centers.row(c)).squaredNorm());
        }
    }
    return centers;
}

} // namespace

KMeansResult KMeans(const Eigen::MatrixXd& data, int m, uint64_t seed, int maxIterations) {
    if (m < 1) {
        throw ParameterError("K-Means needs at least one cluster");
    }
    if (data.rows() < m) {
        throw ParameterError("K-Means needs at least " + std::to_string(m) + " descriptors, got " +
                             std::to_string(data.rows()));
    }
    if (maxIterations < 1) {
        throw ParameterError("K-Means iteration limit must be positive");
    }
    Rng rng(seed);
    const auto n = static_cast<size_t>(data.rows());

    KMeansResult result;
    result.centers = SeedPlusPlus(data, m, rng);
    result.assignment.assign(n, -1);
    std::vector<int> previous;
    std::vector<double> cost(n, 0.0);

    for (int iter = 0; iter < maxIterations; ++iter) {
        result.sseHistory.push_back(AssignAll(data, result.centers, result.assignment, cost));
        result.iterations = iter + 1;
        if (result.assignment == previous) {
            break;
        }
        previous = result.assignment;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, data.cols());
        std::vector<int> counts(static_cast<size_t>(m), 0);
        for (size_t i = 0; i < n; ++i) {
            sums.row(result.assignment[i]) += data.row(static_cast<Eigen::Index>(i));
            ++counts[static_cast<size_t>(result.assignment[i])];
        }
        for (int c = 0; c < m; ++c) {
            if (counts[static_cast<size_t>(c)] > 0) {
                result.centers.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
                continue;
            }
            // Empty cluster: move it onto the worst-served point.
            size_t far = 0;
            for (size_t i = 1; i < n; ++i) {
                if (cost[i] > cost[far]) {
                    far = i;
                }
            }
            result.centers.row(c) = data.row(static_cast<Eigen::Index>(far));
            cost[far] = 0.0;
        }
    }
    return result;
}

Eigen::MatrixXd StackDescriptors(std::span<const features::Descriptor> descriptors) {
    if (descriptors.empty()) {
        return {};
    }
    const Eigen::Index d = descriptors.front().values.size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(descriptors.size()), d);
    for (size_t i = 0; i < descriptors.size(); ++i) {
        if (descriptors[i].values.size() != d) {
            throw ParameterError("descriptor dimensions differ within a batch");
        }
        out.row(static_cast<Eigen::Index>(i)) = descriptors[i].values.transpose();
    }
    return out;
}

Codebook TrainCodebook(std::span<const features::Descriptor> descriptors, int m, uint64_t seed) {
    Codebook cb;
    cb.words = KMeans(StackDescriptors(descriptors), m, seed).centers;
    cb.seed = seed;
    return cb;
}

} // namespace czi::coding
