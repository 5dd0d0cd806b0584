#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hibo/classifiers.hpp"
#include "hibo/history.hpp"

namespace hibo {

/// Knobs for the global-level navigator. max_depth counts tree layers, so
/// max_depth 1 is a root-only tree and the algorithm degrades to the plain
/// local optimizer. depth_fixed pins the depth and disables adaptation.
struct NavigatorConfig {
    int initial_max_depth = 2;
    int depth_limit = 5;
    int success_threshold = 5;  // consecutive successes -> shallower tree
    int failure_threshold = 3;  // consecutive failures -> deeper tree
    double cp = 0.5;            // UCT exploration constant
    double tau = 0.1;           // softmax temperature
    int leaf_size_threshold = 10;
    std::optional<int> depth_fixed;
    int kmeans_restarts = 10;
    int kmeans_max_iters = 100;
};

/// Adaptive-depth state machine (deeper on consecutive failures, shallower
/// on consecutive successes, restart past the depth limit).
struct NavigatorState {
    int max_depth_current = 2;
    int success_count = 0;
    int failure_count = 0;
    bool needs_restart = false;

    static NavigatorState init(const NavigatorConfig& cfg) {
        NavigatorState s;
        s.max_depth_current =
            cfg.depth_fixed ? *cfg.depth_fixed : cfg.initial_max_depth;
        return s;
    }
};

/// Applies one success/failure outcome to the depth controller. No-op when
/// the configured depth is fixed.
NavigatorState adapt_depth(NavigatorState state, bool improved,
                           const NavigatorConfig& cfg);

struct TreeNode {
    int id = 0;
    int depth = 0;  // root = 0
    int parent = -1;
    int left = -1;
    int right = -1;
    std::vector<std::size_t> member_indices;
    int n_visits = 0;
    double v_hat = 0.0;  // mean min-max-normalized objective over members
    std::shared_ptr<TwoWayClassifier> splitter;  // absent on leaves

    bool is_leaf() const { return splitter == nullptr; }
};

class PartitionTree {
public:
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& node(int id) const { return nodes_[id]; }
    const std::vector<int>& leaves() const { return leaves_; }
    int root() const { return 0; }
    /// Number of layers (root-only tree = 1).
    int depth() const { return depth_layers_; }

    /// Walks classifier decisions from the root; total over the unit cube.
    int assign_leaf(const Point& p) const;
    std::vector<int> assign_leaves(const std::vector<Point>& points) const;

    /// UCT_j = v_hat_j + 2 Cp sqrt(2 ln n_parent / n_j); v_hat alone at the
    /// root.
    double uct(int node_id, double cp) const;

    friend PartitionTree build_tree(const HistoryDataset& dataset,
                                    const NavigatorState& state,
                                    const NavigatorConfig& cfg,
                                    std::uint64_t seed);

private:
    std::vector<TreeNode> nodes_;
    std::vector<int> leaves_;
    int depth_layers_ = 1;
};

/// BFS construction: a node splits only while the tree stays within
/// max_depth_current layers, it holds at least leaf_size_threshold samples,
/// and 2-means plus classifier routing separates its members. Deterministic
/// per seed.
PartitionTree build_tree(const HistoryDataset& dataset,
                         const NavigatorState& state,
                         const NavigatorConfig& cfg, std::uint64_t seed);

/// v_hat + 2 cp sqrt(2 ln n_parent / n_node).
double uct_value(double v_hat, double cp, int n_parent, int n_node);

/// Max-subtracted softmax of values / tau.
std::vector<double> softmax_scores(const std::vector<double>& values,
                                   double tau);

struct SplitResult {
    std::vector<std::size_t> left_members;
    std::vector<std::size_t> right_members;
    std::shared_ptr<TwoWayClassifier> classifier;
};

/// Clusters members on [coords ; min-max-normalized value], trains a
/// classifier on the cluster labels (left = higher mean objective), and
/// routes members by classifier prediction. nullopt when the node cannot be
/// split cleanly.
std::optional<SplitResult> split_node(
    const std::vector<std::size_t>& member_indices,
    const HistoryDataset& dataset, const NavigatorConfig& cfg,
    std::uint64_t seed);

/// leaf id -> softmax(UCT / tau); sums to one, single leaf scores 1.
std::map<int, double> partition_scores(const PartitionTree& tree,
                                       const NavigatorConfig& cfg);

}  // namespace hibo
