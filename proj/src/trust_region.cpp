#include "hibo/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hibo/seeding.hpp"

namespace hibo {

TrustRegionState tr_init(const HistoryDataset& dataset,
                         std::size_t restart_start,
                         const TrustRegionConfig& cfg) {
    if (restart_start >= dataset.size()) {
        throw std::invalid_argument("tr_init: no observations in restart");
    }
    TrustRegionState state;
    state.center = dataset[dataset.best_index_since(restart_start)].point;
    state.base_length = cfg.initial_length;
    return state;
}

TrustRegionState tr_update(TrustRegionState state, bool improved,
                           const TrustRegionConfig& cfg) {
    if (improved) {
        state.success_count += 1;
        state.failure_count = 0;
        if (state.success_count >= cfg.success_threshold) {
            state.base_length =
                std::min(2.0 * state.base_length, cfg.max_length);
            state.success_count = 0;
        }
    } else {
        state.failure_count += 1;
        state.success_count = 0;
        if (state.failure_count >= cfg.failure_threshold) {
            state.base_length *= 0.5;
            state.failure_count = 0;
        }
    }
    if (state.base_length < cfg.min_length) {
        state.needs_restart = true;
    }
    return state;
}

int default_candidate_count(std::size_t dim) {
    return static_cast<int>(std::min<std::size_t>(100 * dim, 5000));
}

std::vector<double> tr_axis_lengths(const GpModel& model, double base_length) {
    const Eigen::VectorXd& ls = model.hyperparams().lengthscales;
    double log_mean = ls.array().log().mean();
    double geo_mean = std::exp(log_mean);
    std::vector<double> lengths(ls.size());
    for (Eigen::Index i = 0; i < ls.size(); ++i) {
        lengths[i] = base_length * ls[i] / geo_mean;
    }
    return lengths;
}

CandidateBatch tr_generate_candidates(const TrustRegionState& state,
                                      const GpModel& model, int n_cand,
                                      std::uint64_t seed,
                                      std::uint64_t thompson_seed) {
    if (n_cand < 1) {
        throw std::invalid_argument("tr_generate_candidates: n_cand >= 1");
    }
    const std::size_t d = state.center.size();
    std::vector<double> lengths = tr_axis_lengths(model, state.base_length);

    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        lo[j] = std::max(0.0, state.center[j] - 0.5 * lengths[j]);
        hi[j] = std::min(1.0, state.center[j] + 0.5 * lengths[j]);
    }

    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double p_perturb =
        std::min(20.0 / static_cast<double>(d), 1.0);

    CandidateBatch batch;
    batch.source = CandidateSource::trust_region;
    batch.points.resize(static_cast<std::size_t>(n_cand));
    for (auto& point : batch.points) {
        point.coords.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            point.coords[j] = lo[j] + unit(rng) * (hi[j] - lo[j]);
        }
    }
    // Perturbation mask: unmasked dimensions stay at the center.
    std::uniform_int_distribution<std::size_t> pick_dim(0, d - 1);
    for (auto& point : batch.points) {
        bool any = false;
        for (std::size_t j = 0; j < d; ++j) {
            if (unit(rng) <= p_perturb) {
                any = true;
            } else {
                point.coords[j] = state.center[j];
            }
        }
        if (!any) {
            std::size_t j = pick_dim(rng);
            point.coords[j] = lo[j] + unit(rng) * (hi[j] - lo[j]);
        }
    }

    batch.raw_acq = model.thompson_sample(batch.points, thompson_seed);
    return batch;
}

CandidateBatch gp_generate_candidates(const GpModel& model, int n_cand,
                                      double best, std::size_t dim,
                                      std::uint64_t seed) {
    if (n_cand < 1) {
        throw std::invalid_argument("gp_generate_candidates: n_cand >= 1");
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CandidateBatch batch;
    batch.source = CandidateSource::global;
    batch.points.resize(static_cast<std::size_t>(n_cand));
    for (auto& point : batch.points) {
        point.coords.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) point.coords[j] = unit(rng);
    }
    batch.raw_acq = model.expected_improvement(batch.points, best);
    return batch;
}

}  // namespace hibo
