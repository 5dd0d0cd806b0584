#include "hibo/kmeans.hpp"

#include <limits>

#include "hibo/seeding.hpp"

namespace hibo {

std::optional<TwoMeansResult> two_means(const Eigen::MatrixXd& rows,
                                        std::uint64_t seed, int restarts,
                                        int max_iters) {
    const auto n = rows.rows();
    if (n < 2) return std::nullopt;

    bool any_distinct = false;
    for (Eigen::Index i = 1; i < n && !any_distinct; ++i) {
        any_distinct = (rows.row(i) - rows.row(0)).squaredNorm() > 0.0;
    }
    if (!any_distinct) return std::nullopt;

    Rng rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);

    std::optional<TwoMeansResult> best;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int restart = 0; restart < restarts; ++restart) {
        Eigen::Index a = pick(rng);
        Eigen::Index b = pick(rng);
        if ((rows.row(a) - rows.row(b)).squaredNorm() == 0.0) continue;
        Eigen::MatrixXd c(2, rows.cols());
        c.row(0) = rows.row(a);
        c.row(1) = rows.row(b);

        bool valid = true;
        for (int iter = 0; iter < max_iters; ++iter) {
            bool changed = false;
            Eigen::Index count0 = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double d0 = (rows.row(i) - c.row(0)).squaredNorm();
                double d1 = (rows.row(i) - c.row(1)).squaredNorm();
                int lab = d1 < d0 ? 1 : 0;
                if (lab != labels[i] || iter == 0) changed = true;
                labels[i] = lab;
                count0 += lab == 0;
            }
            if (count0 == 0 || count0 == n) {
                valid = false;
                break;
            }
            if (!changed) break;
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(2, rows.cols());
            for (Eigen::Index i = 0; i < n; ++i) sums.row(labels[i]) += rows.row(i);
            c.row(0) = sums.row(0) / static_cast<double>(count0);
            c.row(1) = sums.row(1) / static_cast<double>(n - count0);
        }
        if (!valid) continue;

        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            inertia += (rows.row(i) - c.row(labels[i])).squaredNorm();
        }
        if (!best || inertia < best->inertia) {
            best = TwoMeansResult{labels, c, inertia};
        }
    }
    return best;
}

}  // namespace hibo
