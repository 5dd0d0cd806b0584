#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "hibo/search_space.hpp"

namespace hibo {

/// One objective evaluation. Values use the maximization convention;
/// minimization benchmarks are negated at the boundary.
struct Observation {
    Point point;
    double value = 0.0;
    bool failed = false;
    double eval_seconds = 0.0;
    int iteration = 0;
};

/// Append-only evaluation log shared by the navigator and the local
/// optimizer. Single writer; safe for concurrent readers between appends.
class HistoryDataset {
public:
    void append(Observation obs) {
        if (obs.iteration != static_cast<int>(observations_.size())) {
            throw std::logic_error("append: observation iteration " +
                                   std::to_string(obs.iteration) +
                                   " does not match dataset length " +
                                   std::to_string(observations_.size()));
        }
        if (obs.value > best_so_far_) {
            best_so_far_ = obs.value;
            best_index_ = observations_.size();
        }
        observations_.push_back(std::move(obs));
    }

    std::size_t size() const { return observations_.size(); }
    bool empty() const { return observations_.empty(); }
    const Observation& operator[](std::size_t i) const {
        return observations_[i];
    }
    const std::vector<Observation>& observations() const {
        return observations_;
    }

    double best_so_far() const { return best_so_far_; }
    std::size_t best_index() const { return best_index_; }

    /// Best value over observations [first, size()); -inf when empty.
    double best_since(std::size_t first) const {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = first; i < observations_.size(); ++i) {
            best = std::max(best, observations_[i].value);
        }
        return best;
    }

    std::size_t best_index_since(std::size_t first) const {
        std::size_t idx = first;
        for (std::size_t i = first; i < observations_.size(); ++i) {
            if (observations_[i].value > observations_[idx].value) idx = i;
        }
        return idx;
    }

private:
    std::vector<Observation> observations_;
    double best_so_far_ = -std::numeric_limits<double>::infinity();
    std::size_t best_index_ = 0;
};

}  // namespace hibo
