#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hibo {

/// One trace row per objective evaluation. The regret column is populated
/// for synthetic benchmarks only; timing columns are zero unless timing is
/// recorded (trace bytes stay reproducible for seeded synthetic runs).
struct TraceRecord {
    int iteration = 0;
    std::vector<double> point_raw;
    double value = 0.0;
    bool failed = false;
    double best_so_far = 0.0;
    std::optional<double> regret;
    int tree_depth = 1;
    int n_leaves = 1;
    double tr_length = 0.0;
    double optim_seconds = 0.0;
    double eval_seconds = 0.0;
};

/// Round-trip-exact formatting used across every emitted file.
std::string format_double(double v);

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& records,
                     const std::vector<std::string>& dim_names);

std::vector<TraceRecord> read_trace_csv(const std::string& path);

struct SeedAggregateRow {
    int iteration = 0;
    double mean_best = 0.0;
    double std_best = 0.0;
    std::optional<double> mean_regret;
    std::optional<double> std_regret;
};

struct SeedAggregate {
    std::vector<SeedAggregateRow> rows;
    double final_mean_best = 0.0;
    double final_std_best = 0.0;
    std::optional<double> final_mean_regret;
    std::optional<double> final_std_regret;
};

/// Per-iteration mean and sample standard deviation of best_so_far and
/// regret across seeds. Throws on mismatched budgets.
SeedAggregate summarize_seeds(
    const std::vector<std::vector<TraceRecord>>& traces);

void write_aggregate_csv(const std::string& path, const SeedAggregate& agg);

}  // namespace hibo
