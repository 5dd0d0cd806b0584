#pragma once

#include <cstdint>
#include <vector>

#include "hibo/gp.hpp"
#include "hibo/history.hpp"

namespace hibo {

struct TrustRegionConfig {
    double initial_length = 0.8;
    double min_length = 0.03125;
    double max_length = 1.6;
    int success_threshold = 3;  // consecutive successes -> double
    int failure_threshold = 5;  // consecutive failures -> halve
};

/// TuRBO-1 trust region: an axis-aligned box around the incumbent best that
/// doubles on consecutive successes and halves on consecutive failures;
/// shrinking below min_length requests a restart.
struct TrustRegionState {
    Point center;
    double base_length = 0.8;
    int success_count = 0;
    int failure_count = 0;
    bool needs_restart = false;
};

/// Fresh state centered on the best point of observations [restart_start,
/// end). Throws when that range is empty.
TrustRegionState tr_init(const HistoryDataset& dataset,
                         std::size_t restart_start,
                         const TrustRegionConfig& cfg);

/// One success/failure transition of the trust-region state machine.
TrustRegionState tr_update(TrustRegionState state, bool improved,
                           const TrustRegionConfig& cfg);

enum class CandidateSource { trust_region, global };

struct CandidateBatch {
    std::vector<Point> points;
    std::vector<double> raw_acq;
    CandidateSource source = CandidateSource::trust_region;
};

/// Default candidate count, min(100 d, 5000).
int default_candidate_count(std::size_t dim);

/// Samples candidates in the trust-region box. Axis lengths scale with the
/// model's ARD lengthscales (geometric mean pinned to base_length), the box
/// is clipped to the unit cube, and each candidate perturbs each dimension
/// with probability min(20/d, 1) — at least one dimension always moves.
/// raw_acq holds a Thompson sample. Deterministic per seed pair.
CandidateBatch tr_generate_candidates(const TrustRegionState& state,
                                      const GpModel& model, int n_cand,
                                      std::uint64_t seed,
                                      std::uint64_t thompson_seed);

/// Global candidates, uniform over the unit cube, scored by expected
/// improvement against `best`.
CandidateBatch gp_generate_candidates(const GpModel& model, int n_cand,
                                      double best, std::size_t dim,
                                      std::uint64_t seed);

/// The per-axis box half-widths used by tr_generate_candidates, before
/// clipping. Exposed for tests.
std::vector<double> tr_axis_lengths(const GpModel& model, double base_length);

}  // namespace hibo
