#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace hibo {

/// 2-way decision boundary learned from labeled samples. predict returns
/// true for the "left" (higher-mean-objective) side. Implementations are
/// immutable after training and safe for concurrent prediction.
class TwoWayClassifier {
public:
    virtual ~TwoWayClassifier() = default;
    virtual bool predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const = 0;
};

/// Kernelized least-squares max-margin classifier with an RBF kernel
/// (LS-SVM: equality-constrained SVM solved as one linear system).
/// gamma defaults to 1 / (d * mean feature variance), the usual scale
/// heuristic; training is deterministic.
std::shared_ptr<TwoWayClassifier> train_rbf_svm(const Eigen::MatrixXd& coords,
                                                const std::vector<int>& labels,
                                                double ridge = 1e-3);

/// Fallback for tiny node populations: predict by closer class centroid.
std::shared_ptr<TwoWayClassifier> train_nearest_centroid(
    const Eigen::MatrixXd& coords, const std::vector<int>& labels);

/// RBF SVM when both classes have at least 2 members and there are at
/// least 4 samples; nearest-centroid otherwise. Labels are 1 for left,
/// 0 for right.
std::shared_ptr<TwoWayClassifier> train_node_classifier(
    const Eigen::MatrixXd& coords, const std::vector<int>& labels);

}  // namespace hibo
