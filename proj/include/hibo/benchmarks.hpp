#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hibo/search_space.hpp"

namespace hibo {

/// Standard synthetic test functions on their literature domains. All are
/// minimization problems; evaluate_raw returns f(x) and the optimizer-facing
/// value is -f(x).
struct SyntheticFunction {
    std::string name;
    int intrinsic_dim = 0;
    std::vector<Dimension> domain;   // per intrinsic dimension
    double optimum_value = 0.0;      // minimum of f
    std::vector<double> optimum_location;

    double evaluate_raw(const std::vector<double>& x) const;
};

/// Known function by name: levy, rastrigin, ackley, branin, hartmann6.
/// levy/rastrigin/ackley accept any dimension; branin is 2-D, hartmann6 6-D.
SyntheticFunction make_function(const std::string& name, int dim);

/// A synthetic function placed inside a larger box: `intrinsic_dim` slots
/// carry the function, the rest are dummy dimensions with exactly zero
/// effect on the output.
class EmbeddedBenchmark {
public:
    EmbeddedBenchmark() = default;
    EmbeddedBenchmark(SyntheticFunction base, int total_dim);

    const SyntheticFunction& base() const { return base_; }
    int total_dim() const { return total_dim_; }
    const SearchSpace& space() const { return space_; }
    /// role_of_slot()[i] == r < intrinsic_dim means slot i is effective
    /// dimension r; any other value marks a dummy slot.
    const std::vector<int>& role_of_slot() const { return role_of_slot_; }
    std::vector<int> effective_slots() const;

    /// Objective in maximization convention: -f at the denormalized
    /// effective coordinates.
    double evaluate(const Point& p) const;

    /// |optimum - achieved| for an achieved raw (minimization-scale) value,
    /// clamped at zero.
    double regret_raw(double achieved_raw) const;
    /// Regret from an optimizer-facing (maximization) value.
    double regret(double value) const { return regret_raw(-value); }

    /// Remaps effective dimensions to a seeded random permutation of slots.
    EmbeddedBenchmark perturb_effective_dims(std::uint64_t permute_seed) const;

private:
    void rebuild_space();

    SyntheticFunction base_;
    int total_dim_ = 0;
    std::vector<int> role_of_slot_;
    SearchSpace space_;
};

EmbeddedBenchmark make_benchmark(const std::string& name, int total_dim,
                                 int effective_dim);

}  // namespace hibo
