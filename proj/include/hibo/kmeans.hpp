#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace hibo {

struct TwoMeansResult {
    std::vector<int> labels;  // 0 or 1 per row
    Eigen::MatrixXd centroids;  // 2 x d
    double inertia = 0.0;
};

/// Seeded 2-means (Lloyd) with restarts. Returns nullopt when the data
/// degenerates: fewer than 2 distinct rows, or every restart leaves a
/// cluster empty.
std::optional<TwoMeansResult> two_means(const Eigen::MatrixXd& rows,
                                        std::uint64_t seed, int restarts = 10,
                                        int max_iters = 100);

}  // namespace hibo
