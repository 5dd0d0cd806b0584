#include "hibo/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "hibo/seeding.hpp"

namespace hibo {

std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::hibo: return "hibo";
        case AlgorithmKind::hibo_gp: return "hibo_gp";
        case AlgorithmKind::turbo: return "turbo";
        case AlgorithmKind::gp_bo: return "gp_bo";
        case AlgorithmKind::random_search: return "random";
        case AlgorithmKind::restricted_tree: return "restricted_tree";
    }
    return "unknown";
}

AlgorithmKind algorithm_from_string(const std::string& name) {
    if (name == "hibo") return AlgorithmKind::hibo;
    if (name == "hibo_gp") return AlgorithmKind::hibo_gp;
    if (name == "turbo") return AlgorithmKind::turbo;
    if (name == "gp_bo") return AlgorithmKind::gp_bo;
    if (name == "random") return AlgorithmKind::random_search;
    if (name == "restricted_tree") return AlgorithmKind::restricted_tree;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::vector<double> weighted_acquisition(const std::vector<double>& raw_acq,
                                         const std::vector<int>& leaf_ids,
                                         const std::map<int, double>& scores) {
    if (raw_acq.size() != leaf_ids.size()) {
        throw std::invalid_argument(
            "weighted_acquisition: acquisition/leaf vectors differ in length");
    }
    double lo = 0.0;
    for (double v : raw_acq) lo = std::min(lo, v);
    std::vector<double> out(raw_acq.size());
    for (std::size_t i = 0; i < raw_acq.size(); ++i) {
        out[i] = (raw_acq[i] - lo) * scores.at(leaf_ids[i]);
    }
    return out;
}

std::size_t select_next(const std::vector<double>& acq) {
    if (acq.empty()) {
        throw std::invalid_argument("select_next: empty candidate batch");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < acq.size(); ++i) {
        if (acq[i] > acq[best]) best = i;
    }
    return best;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool uses_navigator(AlgorithmKind kind) {
    return kind == AlgorithmKind::hibo || kind == AlgorithmKind::hibo_gp ||
           kind == AlgorithmKind::restricted_tree;
}

bool uses_trust_region(AlgorithmKind kind) {
    return kind == AlgorithmKind::hibo || kind == AlgorithmKind::turbo ||
           kind == AlgorithmKind::restricted_tree;
}

// Raised when the objective itself is unrecoverable (e.g. worker spawn
// failure); the partial trace survives in the run result.
struct AbortRun {};

struct Driver {
    Driver(const SearchSpace& space_in, const ObjectiveFn& objective_in,
           const OptimizerConfig& cfg_in, const std::vector<int>& snapshots_in,
           const SnapshotFn& on_snapshot_in)
        : space(space_in),
          objective(objective_in),
          cfg(cfg_in),
          snapshots(snapshots_in),
          on_snapshot(on_snapshot_in) {}

    const SearchSpace& space;
    const ObjectiveFn& objective;
    const OptimizerConfig& cfg;
    const std::vector<int>& snapshots;
    const SnapshotFn& on_snapshot;

    RunResult result;
    // The surrogate fits on [gp_start, end). A trust-region collapse resets
    // it (fresh local model); a navigator restart keeps it and only resets
    // the trust-region geometry and tree depth. The improvement bar window
    // resets on every restart event.
    std::size_t gp_start = 0;
    std::size_t bar_start = 0;
    int restart_ordinal = 0;
    TrustRegionState tr_state;
    NavigatorState nav_state;
    bool have_warm = false;
    GpHyperparams warm;
    int n_cand = 0;
    std::vector<int> pending_snapshots;

    void evaluate_and_append(const Point& p, const StepInfo& info) {
        int iteration = static_cast<int>(result.history.size());
        EvalOutcome outcome;
        try {
            outcome = objective(iteration, p);
        } catch (const std::exception& e) {
            result.error = e.what();
            throw AbortRun{};
        }
        Observation obs;
        obs.point = p;
        obs.value = outcome.value;
        obs.failed = outcome.failed;
        obs.eval_seconds = outcome.eval_seconds;
        obs.iteration = iteration;
        result.history.append(std::move(obs));
        result.step_info.push_back(info);
    }

    int remaining() const {
        return cfg.budget - static_cast<int>(result.history.size());
    }

    std::uint64_t seed_for(SeedPurpose purpose, std::uint64_t extra = 0) const {
        return derive_seed(cfg.seed, static_cast<std::uint64_t>(restart_ordinal),
                           result.history.size(), purpose, extra);
    }

    void draw_initial_batch() {
        int n = std::min(std::max(cfg.init_samples, 2), remaining());
        if (n < 1) return;
        auto seed = derive_seed(cfg.seed,
                                static_cast<std::uint64_t>(restart_ordinal), 0,
                                SeedPurpose::initial_sample);
        auto points = initial_sample(space, n, seed);
        for (const auto& p : points) {
            if (remaining() <= 0) break;
            evaluate_and_append(p, StepInfo{});
        }
    }

    GpModel fit_model(std::uint64_t seed) {
        std::vector<Point> inputs;
        std::vector<double> targets;
        inputs.reserve(result.history.size() - gp_start);
        for (std::size_t i = gp_start; i < result.history.size(); ++i) {
            inputs.push_back(result.history[i].point);
            targets.push_back(result.history[i].value);
        }
        GpFitOptions opts = cfg.gp;
        GpModel model = [&] {
            if (have_warm) {
                opts.adam_steps = cfg.gp_refit_steps;
                return GpModel::fit_warm(inputs, targets, seed, warm, opts);
            }
            return GpModel::fit(inputs, targets, seed, opts);
        }();
        warm = model.hyperparams();
        have_warm = true;
        return model;
    }

    /// Greedy root-to-leaf walk by child UCT.
    int best_uct_leaf(const PartitionTree& tree) const {
        int id = tree.root();
        while (!tree.node(id).is_leaf()) {
            const TreeNode& node = tree.node(id);
            double lu = tree.uct(node.left, cfg.nav.cp);
            double ru = tree.uct(node.right, cfg.nav.cp);
            id = ru > lu ? node.right : node.left;
        }
        return id;
    }

    void maybe_restart() {
        bool tr_wants = uses_trust_region(cfg.algorithm) && tr_state.needs_restart;
        bool nav_wants = uses_navigator(cfg.algorithm) && nav_state.needs_restart;
        if (!tr_wants && !nav_wants) return;
        if (remaining() <= 0) return;

        result.restarts += 1;
        restart_ordinal += 1;
        bar_start = result.history.size();
        if (tr_wants) {
            // Trust-region collapse: full local restart, fresh model data.
            gp_start = bar_start;
            have_warm = false;
        }
        draw_initial_batch();
        if (bar_start >= result.history.size()) return;  // budget gone

        if (uses_trust_region(cfg.algorithm)) {
            // Fresh region over the data the local optimizer still holds:
            // after a collapse that is just the new batch, after a
            // navigator restart it includes the retained window.
            tr_state = tr_init(result.history, gp_start, cfg.tr);
        }
        if (uses_navigator(cfg.algorithm)) {
            if (nav_wants || cfg.reset_navigator_with_tr) {
                nav_state = NavigatorState::init(cfg.nav);
            }
        }
    }

    void emit_snapshot_if_due(const GpModel& model, const PartitionTree* tree,
                              double fit_best) {
        if (!on_snapshot) return;
        int size = static_cast<int>(result.history.size());
        while (!pending_snapshots.empty() && pending_snapshots.front() <= size) {
            int mark = pending_snapshots.front();
            pending_snapshots.erase(pending_snapshots.begin());
            emit_snapshot(model, tree, fit_best, mark);
        }
    }

    void emit_snapshot(const GpModel& model, const PartitionTree* tree,
                       double fit_best, int mark) {
        AcquisitionSnapshot snap;
        snap.iteration = mark;
        snap.incumbent = result.history[result.history.best_index()].point;
        std::uint64_t seed = seed_for(SeedPurpose::landscape);

        std::map<int, double> scores;
        const bool weighted = tree != nullptr &&
                              (cfg.algorithm == AlgorithmKind::hibo ||
                               cfg.algorithm == AlgorithmKind::hibo_gp);
        if (weighted) scores = partition_scores(*tree, cfg.nav);
        const bool use_ei = cfg.algorithm == AlgorithmKind::gp_bo ||
                            cfg.algorithm == AlgorithmKind::hibo_gp;

        snap.acquisition = [&model, tree, scores, weighted, use_ei, seed,
                            fit_best](const std::vector<Point>& points) {
            std::vector<double> raw =
                use_ei ? model.expected_improvement(points, fit_best)
                       : model.thompson_sample(points, seed);
            if (!weighted) return raw;
            std::vector<int> leaf_ids = tree->assign_leaves(points);
            return weighted_acquisition(raw, leaf_ids, scores);
        };
        on_snapshot(snap);
    }

    void run_random() {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        while (remaining() > 0) {
            Rng rng(derive_seed(cfg.seed, 0, result.history.size(),
                                SeedPurpose::random_search));
            Point p;
            p.coords.resize(space.dim());
            for (auto& c : p.coords) c = unit(rng);
            evaluate_and_append(p, StepInfo{});
        }
    }

    void run() {
        n_cand = cfg.n_cand > 0 ? cfg.n_cand
                                : default_candidate_count(space.dim());
        pending_snapshots = snapshots;
        std::sort(pending_snapshots.begin(), pending_snapshots.end());
        if (cfg.algorithm == AlgorithmKind::random_search) {
            run_random();
            return;
        }

        draw_initial_batch();
        if (uses_trust_region(cfg.algorithm)) {
            tr_state = tr_init(result.history, gp_start, cfg.tr);
        }
        nav_state = NavigatorState::init(cfg.nav);

        while (remaining() > 0) {
            step();
            maybe_restart();
        }
        // Marks not reached inside the loop (including the budget boundary
        // itself) get one more model refresh at the end of the run.
        if (on_snapshot && !pending_snapshots.empty() &&
            pending_snapshots.front() <= cfg.budget) {
            PartitionTree tree;
            const PartitionTree* tree_ptr = nullptr;
            if (uses_navigator(cfg.algorithm)) {
                tree = build_tree(result.history, nav_state, cfg.nav,
                                  seed_for(SeedPurpose::kmeans));
                tree_ptr = &tree;
            }
            GpModel model = fit_model(seed_for(SeedPurpose::gp_fit));
            emit_snapshot_if_due(model, tree_ptr,
                                 result.history.best_since(gp_start));
        }
    }

    void step() {
        auto started = Clock::now();

        // Step 1: partition the space and train the surrogate.
        PartitionTree tree;
        const PartitionTree* tree_ptr = nullptr;
        if (uses_navigator(cfg.algorithm)) {
            tree = build_tree(result.history, nav_state, cfg.nav,
                              seed_for(SeedPurpose::kmeans));
            tree_ptr = &tree;
        }
        GpModel model = fit_model(seed_for(SeedPurpose::gp_fit));
        double fit_best = result.history.best_since(gp_start);

        emit_snapshot_if_due(model, tree_ptr, fit_best);

        // Step 2: candidates, partition scores, weighted acquisition.
        CandidateBatch batch;
        std::vector<double> acq;
        switch (cfg.algorithm) {
            case AlgorithmKind::hibo: {
                batch = tr_generate_candidates(
                    tr_state, model, n_cand, seed_for(SeedPurpose::candidates),
                    seed_for(SeedPurpose::thompson));
                auto scores = partition_scores(tree, cfg.nav);
                acq = weighted_acquisition(
                    batch.raw_acq, tree.assign_leaves(batch.points), scores);
                break;
            }
            case AlgorithmKind::turbo: {
                batch = tr_generate_candidates(
                    tr_state, model, n_cand, seed_for(SeedPurpose::candidates),
                    seed_for(SeedPurpose::thompson));
                std::vector<int> root_ids(batch.points.size(), 0);
                acq = weighted_acquisition(batch.raw_acq, root_ids,
                                           {{0, 1.0}});
                break;
            }
            case AlgorithmKind::hibo_gp: {
                batch = gp_generate_candidates(
                    model, n_cand, fit_best, space.dim(),
                    seed_for(SeedPurpose::candidates));
                auto scores = partition_scores(tree, cfg.nav);
                acq = weighted_acquisition(
                    batch.raw_acq, tree.assign_leaves(batch.points), scores);
                break;
            }
            case AlgorithmKind::gp_bo: {
                batch = gp_generate_candidates(
                    model, n_cand, fit_best, space.dim(),
                    seed_for(SeedPurpose::candidates));
                std::vector<int> root_ids(batch.points.size(), 0);
                acq = weighted_acquisition(batch.raw_acq, root_ids,
                                           {{0, 1.0}});
                break;
            }
            case AlgorithmKind::restricted_tree: {
                int target = best_uct_leaf(tree);
                CandidateBatch retained;
                retained.source = CandidateSource::trust_region;
                for (int attempt = 0; attempt < cfg.restricted_retry_cap;
                     ++attempt) {
                    batch = tr_generate_candidates(
                        tr_state, model, n_cand,
                        seed_for(SeedPurpose::candidates, attempt),
                        seed_for(SeedPurpose::thompson, attempt));
                    auto leaf_ids = tree.assign_leaves(batch.points);
                    for (std::size_t i = 0; i < batch.points.size(); ++i) {
                        if (leaf_ids[i] == target) {
                            retained.points.push_back(batch.points[i]);
                            retained.raw_acq.push_back(batch.raw_acq[i]);
                        }
                    }
                    if (static_cast<int>(retained.points.size()) >= n_cand) {
                        break;
                    }
                }
                if (!retained.points.empty()) batch = std::move(retained);
                acq = batch.raw_acq;
                break;
            }
            case AlgorithmKind::random_search:
                throw std::logic_error("random search has no surrogate step");
        }

        // Step 3: evaluate the argmax candidate, update the state machines.
        std::size_t idx = select_next(acq);
        Point chosen = batch.points[idx];

        StepInfo info;
        info.tree_depth = tree_ptr ? tree.depth() : 1;
        info.n_leaves =
            tree_ptr ? static_cast<int>(tree.leaves().size()) : 1;
        info.tr_length =
            uses_trust_region(cfg.algorithm) ? tr_state.base_length : 0.0;
        info.optim_seconds = seconds_since(started);

        double window_best = result.history.best_since(gp_start);
        double bar = result.history.best_since(bar_start);
        evaluate_and_append(chosen, info);
        double value = result.history[result.history.size() - 1].value;
        bool improved = value > bar;

        if (uses_trust_region(cfg.algorithm)) {
            tr_state = tr_update(tr_state, improved, cfg.tr);
            // The box recenters on the best point the model knows about.
            if (value > window_best) tr_state.center = chosen;
        }
        if (uses_navigator(cfg.algorithm)) {
            nav_state = adapt_depth(nav_state, improved, cfg.nav);
        }
    }
};

}  // namespace

RunResult run_optimizer(const SearchSpace& space, const ObjectiveFn& objective,
                        const OptimizerConfig& cfg,
                        const std::vector<int>& snapshot_iterations,
                        const SnapshotFn& on_snapshot) {
    if (cfg.budget < 1) {
        throw std::invalid_argument("run_optimizer: budget must be >= 1");
    }
    if (space.dim() == 0) {
        throw std::invalid_argument("run_optimizer: empty search space");
    }
    Driver driver(space, objective, cfg, snapshot_iterations, on_snapshot);
    try {
        driver.run();
    } catch (const AbortRun&) {
        // Partial trace preserved in the result; error message set.
    }
    return driver.result;
}

}  // namespace hibo
