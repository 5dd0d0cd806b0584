#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hibo/benchmarks.hpp"
#include "hibo/objective_io.hpp"
#include "hibo/optimizer.hpp"
#include "hibo/trace.hpp"

namespace hibo {

struct BenchmarkConfig {
    std::string name;
    int total_dim = 0;
    int effective_dim = 0;
    std::optional<std::uint64_t> permute_seed;
};

struct ExternalConfig {
    std::vector<std::string> command;
    double timeout_seconds = 0.0;
    double failure_penalty = 0.0;
    std::vector<Dimension> space;
    double penalty_seconds_per_failure = 100.0;  // PE in S-PITR
    std::optional<double> baseline;  // default: first observed value
};

/// Fully materialized experiment description. Exactly one of benchmark /
/// external is set. echo() re-emits every resolved field so the echoed file
/// reproduces the run bit-for-bit.
struct RunConfig {
    OptimizerConfig optimizer;
    std::optional<BenchmarkConfig> benchmark;
    std::optional<ExternalConfig> external;
    bool record_timing = false;
    std::string output_dir = "out";

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    nlohmann::json echo() const;

    /// Throws std::invalid_argument listing every offending field.
    void validate() const;
};

struct ExperimentResult {
    std::vector<TraceRecord> trace;
    nlohmann::json summary;
    std::string trace_path;
    std::string summary_path;
    std::string config_echo_path;
};

/// Runs the configured experiment and writes trace.csv, summary.json and
/// config_resolved.json under output_dir.
ExperimentResult run_experiment(const RunConfig& config);

/// Builds trace records from a finished run (exposed for in-process tests).
std::vector<TraceRecord> build_trace(const RunResult& result,
                                     const SearchSpace& space,
                                     const EmbeddedBenchmark* bench,
                                     bool record_timing);

struct LandscapeOptions {
    std::vector<int> snapshot_iterations;
    int grid_n = 100;
    int top_k = 1000;
};

struct LandscapeRow {
    int iteration = 0;
    double x1 = 0.0;
    double x2 = 0.0;
    double acq = 0.0;
};

/// Runs the algorithm and, at each snapshot iteration, evaluates its
/// acquisition on a grid over the first two effective dimensions (remaining
/// coordinates pinned at the incumbent best), keeping the top_k values.
/// Writes landscape_<iter>.csv files under output_dir and returns all rows.
/// Requires a synthetic benchmark with at least 2 effective dimensions.
std::vector<LandscapeRow> dump_landscape(const RunConfig& config,
                                         const LandscapeOptions& opts);

}  // namespace hibo
