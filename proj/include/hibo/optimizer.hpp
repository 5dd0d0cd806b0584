#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hibo/gp.hpp"
#include "hibo/history.hpp"
#include "hibo/navigator.hpp"
#include "hibo/search_space.hpp"
#include "hibo/trust_region.hpp"

namespace hibo {

enum class AlgorithmKind {
    hibo,             // navigator + trust-region local optimizer
    hibo_gp,          // navigator + global GP-BO local optimizer
    turbo,            // trust region only
    gp_bo,            // plain GP-BO
    random_search,    // uniform sampling
    restricted_tree,  // navigator + trust region, sampling confined to the
                      // best-UCT leaf, raw acquisition
};

std::string to_string(AlgorithmKind kind);
AlgorithmKind algorithm_from_string(const std::string& name);

struct OptimizerConfig {
    AlgorithmKind algorithm = AlgorithmKind::hibo;
    int budget = 100;
    int init_samples = 20;
    std::uint64_t seed = 0;
    int n_cand = 0;  // 0 -> min(100 d, 5000)
    TrustRegionConfig tr;
    NavigatorConfig nav;
    GpFitOptions gp;
    int gp_refit_steps = 12;  // Adam steps for warm refits within a restart
    bool reset_navigator_with_tr = true;
    int restricted_retry_cap = 10;
};

struct EvalOutcome {
    double value = 0.0;  // maximization convention
    bool failed = false;
    double eval_seconds = 0.0;
};

using ObjectiveFn = std::function<EvalOutcome(int iteration, const Point&)>;

/// Per-evaluation bookkeeping mirrored into trace rows.
struct StepInfo {
    int tree_depth = 1;
    int n_leaves = 1;
    double tr_length = 0.0;
    double optim_seconds = 0.0;
};

/// State handed to the landscape snapshot callback: the algorithm's
/// acquisition (weighted for navigator kinds, raw otherwise) over arbitrary
/// query points, plus the incumbent best.
struct AcquisitionSnapshot {
    int iteration = 0;  // dataset size at snapshot time
    Point incumbent;
    std::function<std::vector<double>(const std::vector<Point>&)> acquisition;
};

using SnapshotFn = std::function<void(const AcquisitionSnapshot&)>;

struct RunResult {
    HistoryDataset history;
    std::vector<StepInfo> step_info;  // aligned with history
    int restarts = 0;
    // Nonempty when the run aborted on an unrecoverable objective error;
    // history then holds the partial trace up to the failure.
    std::string error;
};

/// Shifts raw acquisition values to be nonnegative (by the batch minimum)
/// and multiplies each by its leaf's partition score.
std::vector<double> weighted_acquisition(const std::vector<double>& raw_acq,
                                         const std::vector<int>& leaf_ids,
                                         const std::map<int, double>& scores);

/// Index of the maximum value; ties break to the lowest index.
std::size_t select_next(const std::vector<double>& acq);

/// Runs the configured algorithm until the evaluation budget is exhausted
/// (initial and restart samples count). Deterministic for a fixed seed with
/// a synchronous objective. `on_snapshot` fires when the dataset size
/// reaches a listed iteration, including one extra model refresh at the end
/// when the budget itself is listed.
RunResult run_optimizer(const SearchSpace& space, const ObjectiveFn& objective,
                        const OptimizerConfig& cfg,
                        const std::vector<int>& snapshot_iterations = {},
                        const SnapshotFn& on_snapshot = nullptr);

}  // namespace hibo
