#include "hibo/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "hibo/kmeans.hpp"
#include "hibo/seeding.hpp"

namespace hibo {

namespace {

struct ValueNormalizer {
    double lo = 0.0;
    double span = 0.0;  // 0 marks the degenerate constant-value case

    explicit ValueNormalizer(const HistoryDataset& dataset) {
        double hi = -std::numeric_limits<double>::infinity();
        lo = std::numeric_limits<double>::infinity();
        for (const auto& obs : dataset.observations()) {
            lo = std::min(lo, obs.value);
            hi = std::max(hi, obs.value);
        }
        span = hi - lo;
    }

    double operator()(double value) const {
        return span > 0.0 ? (value - lo) / span : 0.5;
    }
};

double mean_normalized_value(const std::vector<std::size_t>& members,
                             const HistoryDataset& dataset,
                             const ValueNormalizer& norm) {
    double sum = 0.0;
    for (std::size_t idx : members) sum += norm(dataset[idx].value);
    return sum / static_cast<double>(members.size());
}

}  // namespace

NavigatorState adapt_depth(NavigatorState state, bool improved,
                           const NavigatorConfig& cfg) {
    if (cfg.depth_fixed) return state;
    if (improved) {
        state.success_count += 1;
        state.failure_count = 0;
        if (state.success_count >= cfg.success_threshold) {
            state.max_depth_current = std::max(1, state.max_depth_current - 1);
            state.success_count = 0;
        }
    } else {
        state.failure_count += 1;
        state.success_count = 0;
        if (state.failure_count >= cfg.failure_threshold) {
            state.failure_count = 0;
            int deeper = state.max_depth_current + 1;
            if (deeper > cfg.depth_limit) {
                state.needs_restart = true;
                state.max_depth_current = cfg.initial_max_depth;
            } else {
                state.max_depth_current = deeper;
            }
        }
    }
    return state;
}

std::optional<SplitResult> split_node(
    const std::vector<std::size_t>& member_indices,
    const HistoryDataset& dataset, const NavigatorConfig& cfg,
    std::uint64_t seed) {
    const std::size_t n = member_indices.size();
    if (n < 2) return std::nullopt;
    const std::size_t d = dataset[member_indices[0]].point.size();

    ValueNormalizer norm(dataset);
    // The value feature is weighted sqrt(d) so the performance block carries
    // as much clustering mass as the whole coordinate block; otherwise
    // high-dimensional splits turn purely geometric and the tree stops
    // separating good regions from bad ones.
    const double value_weight = std::sqrt(static_cast<double>(d));
    Eigen::MatrixXd features(n, d + 1);
    Eigen::MatrixXd coords(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const Observation& obs = dataset[member_indices[i]];
        for (std::size_t j = 0; j < d; ++j) {
            coords(i, j) = obs.point[j];
            features(i, j) = obs.point[j];
        }
        features(i, d) = value_weight * norm(obs.value);
    }

    auto clusters =
        two_means(features, seed, cfg.kmeans_restarts, cfg.kmeans_max_iters);
    if (!clusters) return std::nullopt;

    // Left = cluster with the higher mean objective.
    double mean0 = 0.0, mean1 = 0.0;
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (clusters->labels[i] == 0) {
            mean0 += features(i, d);
            ++n0;
        } else {
            mean1 += features(i, d);
            ++n1;
        }
    }
    mean0 /= std::max(n0, 1);
    mean1 /= std::max(n1, 1);
    const int left_cluster = mean0 >= mean1 ? 0 : 1;

    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = clusters->labels[i] == left_cluster ? 1 : 0;
    }

    auto classifier = train_node_classifier(coords, labels);

    // Route members by prediction so tree membership matches how future
    // points will be assigned.
    SplitResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (classifier->predict(coords.row(i))) {
            result.left_members.push_back(member_indices[i]);
        } else {
            result.right_members.push_back(member_indices[i]);
        }
    }
    if (result.left_members.empty() || result.right_members.empty()) {
        return std::nullopt;
    }
    result.classifier = std::move(classifier);
    return result;
}

PartitionTree build_tree(const HistoryDataset& dataset,
                         const NavigatorState& state,
                         const NavigatorConfig& cfg, std::uint64_t seed) {
    if (dataset.empty()) {
        throw std::invalid_argument("build_tree: empty dataset");
    }
    PartitionTree tree;
    ValueNormalizer norm(dataset);

    TreeNode root;
    root.id = 0;
    root.member_indices.resize(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) root.member_indices[i] = i;
    root.n_visits = static_cast<int>(dataset.size());
    root.v_hat = mean_normalized_value(root.member_indices, dataset, norm);
    tree.nodes_.push_back(std::move(root));

    const int max_layers = state.max_depth_current;
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        TreeNode& node = tree.nodes_[id];
        // Children would sit at layer node.depth + 2 (root is layer 1).
        if (node.depth + 2 > max_layers) continue;
        if (static_cast<int>(node.member_indices.size()) <
            cfg.leaf_size_threshold) {
            continue;
        }
        auto split = split_node(node.member_indices, dataset, cfg,
                                derive_seed(seed, {static_cast<std::uint64_t>(id)}));
        if (!split) continue;

        int left_id = static_cast<int>(tree.nodes_.size());
        int right_id = left_id + 1;
        TreeNode left, right;
        left.id = left_id;
        right.id = right_id;
        left.depth = right.depth = node.depth + 1;
        left.parent = right.parent = id;
        left.member_indices = std::move(split->left_members);
        right.member_indices = std::move(split->right_members);
        left.n_visits = static_cast<int>(left.member_indices.size());
        right.n_visits = static_cast<int>(right.member_indices.size());
        left.v_hat = mean_normalized_value(left.member_indices, dataset, norm);
        right.v_hat = mean_normalized_value(right.member_indices, dataset, norm);

        node.splitter = std::move(split->classifier);
        node.left = left_id;
        node.right = right_id;
        tree.nodes_.push_back(std::move(left));
        tree.nodes_.push_back(std::move(right));
        queue.push_back(left_id);
        queue.push_back(right_id);
    }

    tree.depth_layers_ = 1;
    for (const auto& node : tree.nodes_) {
        tree.depth_layers_ = std::max(tree.depth_layers_, node.depth + 1);
        if (node.is_leaf()) tree.leaves_.push_back(node.id);
    }
    return tree;
}

int PartitionTree::assign_leaf(const Point& p) const {
    Eigen::RowVectorXd x(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) x[j] = p[j];
    int id = 0;
    while (!nodes_[id].is_leaf()) {
        id = nodes_[id].splitter->predict(x) ? nodes_[id].left
                                             : nodes_[id].right;
    }
    return id;
}

std::vector<int> PartitionTree::assign_leaves(
    const std::vector<Point>& points) const {
    std::vector<int> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = assign_leaf(points[i]);
    }
    return out;
}

double uct_value(double v_hat, double cp, int n_parent, int n_node) {
    return v_hat + 2.0 * cp *
                       std::sqrt(2.0 * std::log(static_cast<double>(n_parent)) /
                                 static_cast<double>(n_node));
}

std::vector<double> softmax_scores(const std::vector<double>& values,
                                   double tau) {
    double max_value = -std::numeric_limits<double>::infinity();
    for (double v : values) max_value = std::max(max_value, v);
    std::vector<double> out(values.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp((values[i] - max_value) / tau);
        denom += out[i];
    }
    for (double& v : out) v /= denom;
    return out;
}

double PartitionTree::uct(int node_id, double cp) const {
    const TreeNode& node = nodes_[node_id];
    if (node.parent < 0) return node.v_hat;
    return uct_value(node.v_hat, cp, nodes_[node.parent].n_visits,
                     node.n_visits);
}

std::map<int, double> partition_scores(const PartitionTree& tree,
                                       const NavigatorConfig& cfg) {
    const auto& leaves = tree.leaves();
    if (leaves.empty()) {
        throw std::logic_error("partition_scores: tree has no leaves");
    }
    std::vector<double> ucts(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        ucts[i] = tree.uct(leaves[i], cfg.cp);
    }
    std::vector<double> soft = softmax_scores(ucts, cfg.tau);
    std::map<int, double> scores;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        scores[leaves[i]] = soft[i];
    }
    return scores;
}

}  // namespace hibo
