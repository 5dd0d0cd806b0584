#pragma once

#include <string>
#include <vector>

#include "hibo/history.hpp"
#include "hibo/search_space.hpp"

namespace hibo {

/// External black-box objective reached over a line protocol: one process
/// per evaluation, one UTF-8 JSON object per line on stdin/stdout.
/// Request keys: iteration, params. Reply keys: objective, failed,
/// eval_seconds. Unknown keys are ignored.
struct ExternalObjectiveSpec {
    std::vector<std::string> command;  // executable + args
    double timeout_seconds = 0.0;      // <= 0 means no timeout
    double failure_penalty_value = 0.0;
    SearchSpace space;  // parameter manifest, names must match the run space
};

/// Spawns the worker, round-trips one evaluation, and classifies the
/// outcome. Nonzero exit, malformed reply, or timeout produce a failed
/// observation carrying the penalty value and wall-clock eval_seconds;
/// failure to spawn at all throws std::runtime_error. The returned
/// observation's point is left empty (the caller owns normalization).
Observation evaluate_external(const ExternalObjectiveSpec& spec, int iteration,
                              const std::vector<double>& point_raw);

/// Safety-weighted Performance Improvement-Time Ratio inputs:
/// improvement over baseline, total tuning seconds, failed-evaluation
/// count, and penalty seconds per failure.
struct SPitrInputs {
    double performance_improvement = 0.0;
    double total_tuning_seconds = 0.0;
    int failed_count = 0;
    double penalty_seconds_per_failure = 0.0;
};

/// PI / (TT + NF * PE). Throws std::invalid_argument on a nonpositive
/// denominator or negative inputs.
double s_pitr(const SPitrInputs& inputs);

}  // namespace hibo
