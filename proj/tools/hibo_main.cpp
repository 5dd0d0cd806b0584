#include <CLI11.hpp>
#include <iostream>

#include "hibo/experiment.hpp"
#include "hibo/trace.hpp"

int main(int argc, char** argv) {
    CLI::App app{"HiBO: hierarchical Bayesian optimization over partitioned "
                 "search spaces"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run one seeded experiment");
    run_cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    std::string out_path;
    std::vector<std::string> trace_paths;
    auto* sum_cmd =
        app.add_subcommand("summarize", "aggregate traces across seeds");
    sum_cmd->add_option("--out", out_path, "aggregate CSV path")->required();
    sum_cmd->add_option("traces", trace_paths, "trace CSV files")
        ->required()
        ->check(CLI::ExistingFile);

    std::string land_config;
    std::vector<int> iters;
    int grid_n = 100;
    int top_k = 1000;
    auto* land_cmd = app.add_subcommand(
        "landscape", "dump top acquisition values on a 2-D grid");
    land_cmd->add_option("--config", land_config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    land_cmd->add_option("--iters", iters, "snapshot iterations")->required();
    land_cmd->add_option("--grid", grid_n, "grid resolution per axis");
    land_cmd->add_option("--topk", top_k, "values kept per snapshot");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            hibo::RunConfig config = hibo::RunConfig::load(config_path);
            hibo::ExperimentResult result = hibo::run_experiment(config);
            std::cout << "trace:   " << result.trace_path << '\n'
                      << "summary: " << result.summary_path << '\n'
                      << result.summary.dump(2) << '\n';
        } else if (sum_cmd->parsed()) {
            std::vector<std::vector<hibo::TraceRecord>> traces;
            for (const auto& path : trace_paths) {
                traces.push_back(hibo::read_trace_csv(path));
            }
            hibo::SeedAggregate agg = hibo::summarize_seeds(traces);
            hibo::write_aggregate_csv(out_path, agg);
            std::cout << "aggregate: " << out_path << '\n'
                      << "final mean best: "
                      << hibo::format_double(agg.final_mean_best) << " +/- "
                      << hibo::format_double(agg.final_std_best) << '\n';
            if (agg.final_mean_regret) {
                std::cout << "final mean regret: "
                          << hibo::format_double(*agg.final_mean_regret)
                          << " +/- "
                          << hibo::format_double(*agg.final_std_regret)
                          << '\n';
            }
        } else if (land_cmd->parsed()) {
            hibo::RunConfig config = hibo::RunConfig::load(land_config);
            hibo::LandscapeOptions opts;
            opts.snapshot_iterations = iters;
            opts.grid_n = grid_n;
            opts.top_k = top_k;
            auto rows = hibo::dump_landscape(config, opts);
            std::cout << "wrote " << rows.size() << " rows under "
                      << config.output_dir << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
