#include "hibo/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hibo {

namespace {

using nlohmann::json;

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

void parse_trust_region(const json& j, TrustRegionConfig& tr) {
    get_if_present(j, "initial_length", tr.initial_length);
    get_if_present(j, "min_length", tr.min_length);
    get_if_present(j, "max_length", tr.max_length);
    get_if_present(j, "success_threshold", tr.success_threshold);
    get_if_present(j, "failure_threshold", tr.failure_threshold);
}

void parse_navigator(const json& j, NavigatorConfig& nav) {
    get_if_present(j, "initial_max_depth", nav.initial_max_depth);
    get_if_present(j, "depth_limit", nav.depth_limit);
    get_if_present(j, "success_threshold", nav.success_threshold);
    get_if_present(j, "failure_threshold", nav.failure_threshold);
    get_if_present(j, "cp", nav.cp);
    get_if_present(j, "tau", nav.tau);
    get_if_present(j, "leaf_size_threshold", nav.leaf_size_threshold);
    if (j.contains("depth_fixed") && !j.at("depth_fixed").is_null()) {
        nav.depth_fixed = j.at("depth_fixed").get<int>();
    }
    get_if_present(j, "kmeans_restarts", nav.kmeans_restarts);
    get_if_present(j, "kmeans_max_iters", nav.kmeans_max_iters);
}

void parse_gp(const json& j, GpFitOptions& gp, int& refit_steps) {
    get_if_present(j, "lengthscale_min", gp.lengthscale_min);
    get_if_present(j, "lengthscale_max", gp.lengthscale_max);
    get_if_present(j, "noise_min", gp.noise_min);
    get_if_present(j, "noise_max", gp.noise_max);
    get_if_present(j, "signal_min", gp.signal_min);
    get_if_present(j, "signal_max", gp.signal_max);
    get_if_present(j, "restarts", gp.restarts);
    get_if_present(j, "adam_steps", gp.adam_steps);
    get_if_present(j, "adam_lr", gp.adam_lr);
    std::uint64_t cap = gp.thompson_joint_cap;
    get_if_present(j, "thompson_joint_cap", cap);
    gp.thompson_joint_cap = cap;
    get_if_present(j, "refit_steps", refit_steps);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    std::string algorithm = to_string(cfg.optimizer.algorithm);
    get_if_present(j, "algorithm", algorithm);
    cfg.optimizer.algorithm = algorithm_from_string(algorithm);
    get_if_present(j, "seed", cfg.optimizer.seed);
    get_if_present(j, "budget", cfg.optimizer.budget);
    get_if_present(j, "init_samples", cfg.optimizer.init_samples);
    get_if_present(j, "n_cand", cfg.optimizer.n_cand);
    get_if_present(j, "reset_navigator_with_tr",
                   cfg.optimizer.reset_navigator_with_tr);
    get_if_present(j, "restricted_retry_cap",
                   cfg.optimizer.restricted_retry_cap);
    get_if_present(j, "record_timing", cfg.record_timing);
    get_if_present(j, "output_dir", cfg.output_dir);

    if (j.contains("trust_region")) {
        parse_trust_region(j.at("trust_region"), cfg.optimizer.tr);
    }
    if (j.contains("navigator")) {
        parse_navigator(j.at("navigator"), cfg.optimizer.nav);
    }
    if (j.contains("gp")) {
        parse_gp(j.at("gp"), cfg.optimizer.gp, cfg.optimizer.gp_refit_steps);
    }

    if (j.contains("benchmark") && !j.at("benchmark").is_null()) {
        const json& b = j.at("benchmark");
        BenchmarkConfig bench;
        bench.name = b.at("name").get<std::string>();
        bench.total_dim = b.at("total_dim").get<int>();
        bench.effective_dim = b.contains("effective_dim")
                                  ? b.at("effective_dim").get<int>()
                                  : bench.total_dim;
        if (b.contains("permute_seed") && !b.at("permute_seed").is_null()) {
            bench.permute_seed = b.at("permute_seed").get<std::uint64_t>();
        }
        cfg.benchmark = std::move(bench);
    }
    if (j.contains("external") && !j.at("external").is_null()) {
        const json& e = j.at("external");
        ExternalConfig ext;
        ext.command = e.at("command").get<std::vector<std::string>>();
        get_if_present(e, "timeout_seconds", ext.timeout_seconds);
        get_if_present(e, "failure_penalty", ext.failure_penalty);
        get_if_present(e, "penalty_seconds_per_failure",
                       ext.penalty_seconds_per_failure);
        if (e.contains("baseline") && !e.at("baseline").is_null()) {
            ext.baseline = e.at("baseline").get<double>();
        }
        for (const json& d : e.at("space")) {
            ext.space.push_back(Dimension{d.at("name").get<std::string>(),
                                          d.at("lower").get<double>(),
                                          d.at("upper").get<double>()});
        }
        cfg.external = std::move(ext);
        // Real-system timing is the point of external runs.
        if (!j.contains("record_timing")) cfg.record_timing = true;
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config '" + path + "'");
    }
    json j = json::parse(in);
    return from_json(j);
}

json RunConfig::echo() const {
    json j;
    j["algorithm"] = to_string(optimizer.algorithm);
    j["seed"] = optimizer.seed;
    j["budget"] = optimizer.budget;
    j["init_samples"] = optimizer.init_samples;
    j["n_cand"] = optimizer.n_cand;
    j["reset_navigator_with_tr"] = optimizer.reset_navigator_with_tr;
    j["restricted_retry_cap"] = optimizer.restricted_retry_cap;
    j["record_timing"] = record_timing;
    j["output_dir"] = output_dir;
    j["trust_region"] = {
        {"initial_length", optimizer.tr.initial_length},
        {"min_length", optimizer.tr.min_length},
        {"max_length", optimizer.tr.max_length},
        {"success_threshold", optimizer.tr.success_threshold},
        {"failure_threshold", optimizer.tr.failure_threshold},
    };
    j["navigator"] = {
        {"initial_max_depth", optimizer.nav.initial_max_depth},
        {"depth_limit", optimizer.nav.depth_limit},
        {"success_threshold", optimizer.nav.success_threshold},
        {"failure_threshold", optimizer.nav.failure_threshold},
        {"cp", optimizer.nav.cp},
        {"tau", optimizer.nav.tau},
        {"leaf_size_threshold", optimizer.nav.leaf_size_threshold},
        {"depth_fixed", optimizer.nav.depth_fixed
                            ? json(*optimizer.nav.depth_fixed)
                            : json(nullptr)},
        {"kmeans_restarts", optimizer.nav.kmeans_restarts},
        {"kmeans_max_iters", optimizer.nav.kmeans_max_iters},
    };
    j["gp"] = {
        {"lengthscale_min", optimizer.gp.lengthscale_min},
        {"lengthscale_max", optimizer.gp.lengthscale_max},
        {"noise_min", optimizer.gp.noise_min},
        {"noise_max", optimizer.gp.noise_max},
        {"signal_min", optimizer.gp.signal_min},
        {"signal_max", optimizer.gp.signal_max},
        {"restarts", optimizer.gp.restarts},
        {"adam_steps", optimizer.gp.adam_steps},
        {"adam_lr", optimizer.gp.adam_lr},
        {"thompson_joint_cap", optimizer.gp.thompson_joint_cap},
        {"refit_steps", optimizer.gp_refit_steps},
    };
    if (benchmark) {
        j["benchmark"] = {
            {"name", benchmark->name},
            {"total_dim", benchmark->total_dim},
            {"effective_dim", benchmark->effective_dim},
            {"permute_seed", benchmark->permute_seed
                                 ? json(*benchmark->permute_seed)
                                 : json(nullptr)},
        };
    } else {
        j["benchmark"] = nullptr;
    }
    if (external) {
        json dims = json::array();
        for (const auto& d : external->space) {
            dims.push_back(
                {{"name", d.name}, {"lower", d.lower}, {"upper", d.upper}});
        }
        j["external"] = {
            {"command", external->command},
            {"timeout_seconds", external->timeout_seconds},
            {"failure_penalty", external->failure_penalty},
            {"penalty_seconds_per_failure",
             external->penalty_seconds_per_failure},
            {"baseline",
             external->baseline ? json(*external->baseline) : json(nullptr)},
            {"space", dims},
        };
    } else {
        j["external"] = nullptr;
    }
    return j;
}

void RunConfig::validate() const {
    std::vector<std::string> errors;
    if (optimizer.budget < 1) errors.push_back("budget: must be >= 1");
    if (optimizer.init_samples < 2) {
        errors.push_back("init_samples: must be >= 2");
    }
    if (optimizer.init_samples >= optimizer.budget) {
        errors.push_back("init_samples: must be < budget");
    }
    if (!benchmark && !external) {
        errors.push_back("benchmark/external: exactly one must be set");
    }
    if (benchmark && external) {
        errors.push_back("benchmark/external: mutually exclusive");
    }
    if (benchmark) {
        if (benchmark->total_dim < 1) {
            errors.push_back("benchmark.total_dim: must be >= 1");
        }
        if (benchmark->effective_dim > benchmark->total_dim) {
            errors.push_back("benchmark.effective_dim: must be <= total_dim");
        }
        if (benchmark->effective_dim < 1) {
            errors.push_back("benchmark.effective_dim: must be >= 1");
        }
    }
    if (external) {
        if (external->command.empty()) {
            errors.push_back("external.command: must not be empty");
        }
        if (external->space.empty()) {
            errors.push_back("external.space: must not be empty");
        }
    }
    if (optimizer.nav.tau <= 0.0) errors.push_back("navigator.tau: must be > 0");
    if (optimizer.nav.depth_limit < 1) {
        errors.push_back("navigator.depth_limit: must be >= 1");
    }
    if (optimizer.tr.min_length <= 0.0) {
        errors.push_back("trust_region.min_length: must be > 0");
    }
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
}

std::vector<TraceRecord> build_trace(const RunResult& result,
                                     const SearchSpace& space,
                                     const EmbeddedBenchmark* bench,
                                     bool record_timing) {
    std::vector<TraceRecord> trace;
    trace.reserve(result.history.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        const Observation& obs = result.history[i];
        const StepInfo& info = result.step_info[i];
        TraceRecord r;
        r.iteration = obs.iteration;
        r.point_raw = denormalize(space, obs.point);
        r.value = obs.value;
        r.failed = obs.failed;
        best = std::max(best, obs.value);
        r.best_so_far = best;
        if (bench != nullptr) r.regret = bench->regret(best);
        r.tree_depth = info.tree_depth;
        r.n_leaves = info.n_leaves;
        r.tr_length = info.tr_length;
        r.optim_seconds = record_timing ? info.optim_seconds : 0.0;
        r.eval_seconds = obs.eval_seconds;
        trace.push_back(std::move(r));
    }
    return trace;
}

namespace {

struct Problem {
    SearchSpace space;
    std::optional<EmbeddedBenchmark> bench;
    ObjectiveFn objective;
};

Problem make_problem(const RunConfig& config) {
    Problem problem;
    if (config.benchmark) {
        EmbeddedBenchmark bench =
            make_benchmark(config.benchmark->name, config.benchmark->total_dim,
                           config.benchmark->effective_dim);
        if (config.benchmark->permute_seed) {
            bench = bench.perturb_effective_dims(*config.benchmark->permute_seed);
        }
        problem.space = bench.space();
        problem.bench = bench;
        problem.objective = [bench = *problem.bench](int, const Point& p) {
            return EvalOutcome{bench.evaluate(p), false, 0.0};
        };
    } else {
        ExternalObjectiveSpec spec;
        spec.command = config.external->command;
        spec.timeout_seconds = config.external->timeout_seconds;
        spec.failure_penalty_value = config.external->failure_penalty;
        spec.space = SearchSpace(config.external->space);
        problem.space = spec.space;
        problem.objective = [spec](int iteration, const Point& p) {
            std::vector<double> raw = denormalize(spec.space, p);
            Observation obs = evaluate_external(spec, iteration, raw);
            return EvalOutcome{obs.value, obs.failed, obs.eval_seconds};
        };
    }
    return problem;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
    config.validate();
    Problem problem = make_problem(config);

    RunResult result =
        run_optimizer(problem.space, problem.objective, config.optimizer);

    std::vector<TraceRecord> trace =
        build_trace(result, problem.space,
                    problem.bench ? &*problem.bench : nullptr,
                    config.record_timing);

    if (!result.error.empty()) {
        // Unrecoverable objective error: keep the partial trace on disk,
        // then propagate.
        std::filesystem::create_directories(config.output_dir);
        std::vector<std::string> names;
        for (const auto& d : problem.space.dims()) names.push_back(d.name);
        write_trace_csv(config.output_dir + "/trace.csv", trace, names);
        throw std::runtime_error("run aborted after " +
                                 std::to_string(trace.size()) +
                                 " evaluations: " + result.error);
    }

    // Post-run sanity: monotone best, one row per evaluation.
    if (static_cast<int>(trace.size()) != config.optimizer.budget) {
        throw std::logic_error("trace row count does not match budget");
    }
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i].best_so_far < trace[i - 1].best_so_far) {
            throw std::logic_error("best_so_far decreased within a trace");
        }
    }

    std::filesystem::create_directories(config.output_dir);
    ExperimentResult out;
    out.trace = std::move(trace);
    out.trace_path = config.output_dir + "/trace.csv";
    out.summary_path = config.output_dir + "/summary.json";
    out.config_echo_path = config.output_dir + "/config_resolved.json";

    std::vector<std::string> dim_names;
    for (const auto& d : problem.space.dims()) dim_names.push_back(d.name);
    write_trace_csv(out.trace_path, out.trace, dim_names);

    nlohmann::json summary;
    summary["algorithm"] = to_string(config.optimizer.algorithm);
    summary["n_evaluations"] = out.trace.size();
    summary["restarts"] = result.restarts;
    summary["final_best"] = out.trace.back().best_so_far;
    int n_failed = 0;
    double total_optim = 0.0, total_eval = 0.0;
    for (const auto& r : out.trace) {
        n_failed += r.failed ? 1 : 0;
        total_optim += r.optim_seconds;
        total_eval += r.eval_seconds;
    }
    summary["n_failed"] = n_failed;
    summary["total_optim_seconds"] = total_optim;
    summary["total_eval_seconds"] = total_eval;
    if (problem.bench) {
        summary["final_regret"] = *out.trace.back().regret;
        double mean_regret = 0.0;
        for (const auto& r : out.trace) mean_regret += *r.regret;
        summary["mean_regret"] = mean_regret / out.trace.size();
    }
    if (config.external) {
        double baseline = config.external->baseline
                              ? *config.external->baseline
                              : out.trace.front().value;
        SPitrInputs inputs;
        inputs.performance_improvement = out.trace.back().best_so_far - baseline;
        inputs.total_tuning_seconds = total_optim + total_eval;
        inputs.failed_count = n_failed;
        inputs.penalty_seconds_per_failure =
            config.external->penalty_seconds_per_failure;
        summary["baseline"] = baseline;
        double denom = inputs.total_tuning_seconds +
                       inputs.failed_count * inputs.penalty_seconds_per_failure;
        summary["s_pitr"] =
            denom > 0.0 ? json(s_pitr(inputs)) : json(nullptr);
    }
    out.summary = summary;

    std::ofstream summary_out(out.summary_path);
    summary_out << summary.dump(2) << '\n';
    std::ofstream echo_out(out.config_echo_path);
    echo_out << config.echo().dump(2) << '\n';
    return out;
}

std::vector<LandscapeRow> dump_landscape(const RunConfig& config,
                                         const LandscapeOptions& opts) {
    config.validate();
    if (!config.benchmark) {
        throw std::invalid_argument(
            "dump_landscape: requires a synthetic benchmark");
    }
    Problem problem = make_problem(config);
    if (problem.bench->base().intrinsic_dim < 2) {
        throw std::invalid_argument(
            "dump_landscape: benchmark needs >= 2 effective dimensions");
    }
    if (opts.grid_n < 2 || opts.top_k < 1) {
        throw std::invalid_argument("dump_landscape: bad grid/top_k");
    }

    std::vector<int> slots = problem.bench->effective_slots();
    const int sx = slots[0];
    const int sy = slots[1];
    const SearchSpace& space = problem.space;

    std::vector<LandscapeRow> all_rows;
    SnapshotFn hook = [&](const AcquisitionSnapshot& snap) {
        const int g = opts.grid_n;
        std::vector<Point> grid;
        grid.reserve(static_cast<std::size_t>(g) * g);
        for (int iy = 0; iy < g; ++iy) {
            for (int ix = 0; ix < g; ++ix) {
                Point p = snap.incumbent;
                p[static_cast<std::size_t>(sx)] = (ix + 0.5) / g;
                p[static_cast<std::size_t>(sy)] = (iy + 0.5) / g;
                grid.push_back(std::move(p));
            }
        }
        std::vector<double> acq = snap.acquisition(grid);

        std::vector<std::size_t> order(acq.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return acq[a] > acq[b];
                         });
        std::size_t keep =
            std::min<std::size_t>(order.size(), opts.top_k);
        for (std::size_t i = 0; i < keep; ++i) {
            std::size_t idx = order[i];
            std::vector<double> raw = denormalize(space, grid[idx]);
            all_rows.push_back(LandscapeRow{
                snap.iteration, raw[static_cast<std::size_t>(sx)],
                raw[static_cast<std::size_t>(sy)], acq[idx]});
        }
    };

    run_optimizer(space, problem.objective, config.optimizer,
                  opts.snapshot_iterations, hook);

    std::filesystem::create_directories(config.output_dir);
    for (int iter : opts.snapshot_iterations) {
        std::string path = config.output_dir + "/landscape_" +
                           std::to_string(iter) + ".csv";
        std::ofstream out(path);
        out << "iter,x1,x2,acq\n";
        for (const auto& row : all_rows) {
            if (row.iteration != iter) continue;
            out << row.iteration << ',' << format_double(row.x1) << ','
                << format_double(row.x2) << ',' << format_double(row.acq)
                << '\n';
        }
    }
    return all_rows;
}

}  // namespace hibo
