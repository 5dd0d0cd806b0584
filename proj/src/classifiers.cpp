#include "hibo/classifiers.hpp"

#include <algorithm>
#include <stdexcept>

namespace hibo {

namespace {

class RbfLsSvmClassifier final : public TwoWayClassifier {
public:
    RbfLsSvmClassifier(Eigen::MatrixXd support, Eigen::VectorXd dual,
                       double bias, double gamma)
        : support_(std::move(support)),
          dual_(std::move(dual)),
          bias_(bias),
          gamma_(gamma) {}

    bool predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
        double score = bias_;
        for (Eigen::Index i = 0; i < support_.rows(); ++i) {
            double sq = (support_.row(i) - x).squaredNorm();
            score += dual_[i] * std::exp(-gamma_ * sq);
        }
        return score >= 0.0;
    }

private:
    Eigen::MatrixXd support_;
    Eigen::VectorXd dual_;
    double bias_;
    double gamma_;
};

class NearestCentroidClassifier final : public TwoWayClassifier {
public:
    NearestCentroidClassifier(Eigen::RowVectorXd left, Eigen::RowVectorXd right)
        : left_(std::move(left)), right_(std::move(right)) {}

    bool predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const override {
        return (x - left_).squaredNorm() <= (x - right_).squaredNorm();
    }

private:
    Eigen::RowVectorXd left_;
    Eigen::RowVectorXd right_;
};

void check_labels(const Eigen::MatrixXd& coords,
                  const std::vector<int>& labels) {
    if (static_cast<std::size_t>(coords.rows()) != labels.size()) {
        throw std::invalid_argument("classifier: coords/labels size mismatch");
    }
    int left = 0;
    for (int lab : labels) left += lab != 0;
    if (left == 0 || left == static_cast<int>(labels.size())) {
        throw std::invalid_argument("classifier: need both classes present");
    }
}

}  // namespace

std::shared_ptr<TwoWayClassifier> train_rbf_svm(const Eigen::MatrixXd& coords,
                                                const std::vector<int>& labels,
                                                double ridge) {
    check_labels(coords, labels);
    const auto n = coords.rows();
    const auto d = coords.cols();

    double var = 0.0;
    Eigen::RowVectorXd mean = coords.colwise().mean();
    for (Eigen::Index j = 0; j < d; ++j) {
        var += (coords.col(j).array() - mean[j]).square().mean();
    }
    var /= static_cast<double>(d);
    double gamma = 1.0 / (static_cast<double>(d) * std::max(var, 1e-12));

    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double sq = (coords.row(i) - coords.row(j)).squaredNorm();
            k(i, j) = k(j, i) = std::exp(-gamma * sq);
        }
    }

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] != 0 ? 1.0 : -1.0;

    // Bordered system for the bias term: [0 1'; 1 K+ridge*I][b; a] = [0; y].
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 1, n + 1);
    sys(0, 0) = 0.0;
    sys.block(0, 1, 1, n).setOnes();
    sys.block(1, 0, n, 1).setOnes();
    sys.block(1, 1, n, n) = k;
    sys.block(1, 1, n, n).diagonal().array() += ridge;

    Eigen::VectorXd rhs(n + 1);
    rhs[0] = 0.0;
    rhs.tail(n) = y;
    Eigen::VectorXd sol = sys.partialPivLu().solve(rhs);

    return std::make_shared<RbfLsSvmClassifier>(coords, sol.tail(n), sol[0],
                                                gamma);
}

std::shared_ptr<TwoWayClassifier> train_nearest_centroid(
    const Eigen::MatrixXd& coords, const std::vector<int>& labels) {
    check_labels(coords, labels);
    Eigen::RowVectorXd left = Eigen::RowVectorXd::Zero(coords.cols());
    Eigen::RowVectorXd right = Eigen::RowVectorXd::Zero(coords.cols());
    int nl = 0, nr = 0;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        if (labels[i] != 0) {
            left += coords.row(i);
            ++nl;
        } else {
            right += coords.row(i);
            ++nr;
        }
    }
    left /= static_cast<double>(nl);
    right /= static_cast<double>(nr);
    return std::make_shared<NearestCentroidClassifier>(left, right);
}

std::shared_ptr<TwoWayClassifier> train_node_classifier(
    const Eigen::MatrixXd& coords, const std::vector<int>& labels) {
    int left = 0;
    for (int lab : labels) left += lab != 0;
    int right = static_cast<int>(labels.size()) - left;
    if (labels.size() >= 4 && left >= 2 && right >= 2) {
        return train_rbf_svm(coords, labels);
    }
    return train_nearest_centroid(coords, labels);
}

}  // namespace hibo
