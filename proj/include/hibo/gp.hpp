#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hibo/history.hpp"
#include "hibo/search_space.hpp"

namespace hibo {

/// Bounds and defaults for the GP hyperparameter search. Lengthscales and
/// noise are box-constrained; signal variance is a free positive scale.
struct GpFitOptions {
    double lengthscale_min = 0.005;
    double lengthscale_max = 4.0;
    double noise_min = 1e-8;
    double noise_max = 1e-3;
    double signal_min = 5e-2;
    double signal_max = 2e1;
    int restarts = 3;      // independent optimizer starts, >= 3
    int adam_steps = 48;   // gradient steps per start
    double adam_lr = 0.1;
    std::size_t thompson_joint_cap = 2000;
};

struct GpHyperparams {
    Eigen::VectorXd lengthscales;  // one per input dimension
    double signal_variance = 1.0;
    double noise_variance = 1e-4;
};

/// Exact GP with an ARD Matern-5/2 kernel. Targets are standardized to zero
/// mean / unit variance internally and de-standardized on output. Immutable
/// after construction; posterior queries are pure.
class GpModel {
public:
    /// Fits hyperparameters by maximizing the log marginal likelihood with
    /// multi-start projected Adam. Throws std::invalid_argument with fewer
    /// than 2 observations, std::runtime_error if the kernel stays
    /// non-positive-definite after jitter escalation.
    static GpModel fit(const std::vector<Point>& inputs,
                       const std::vector<double>& targets, std::uint64_t seed,
                       const GpFitOptions& opts = {});

    /// Warm-started fit: `warm` replaces the default first start.
    static GpModel fit_warm(const std::vector<Point>& inputs,
                            const std::vector<double>& targets,
                            std::uint64_t seed, const GpHyperparams& warm,
                            const GpFitOptions& opts = {});

    /// Builds a model with fixed hyperparameters (no fitting).
    static GpModel from_data(const std::vector<Point>& inputs,
                             const std::vector<double>& targets,
                             GpHyperparams params,
                             const GpFitOptions& opts = {});

    /// Posterior mean and latent variance at the given points, in original
    /// target units. Variance is clamped at zero.
    void posterior(const std::vector<Point>& points,
                   std::vector<double>& mean_out,
                   std::vector<double>& var_out) const;

    /// One draw from the posterior at the given points; a joint draw up to
    /// the configured cap, independent marginal draws beyond it.
    /// Deterministic per seed.
    std::vector<double> thompson_sample(const std::vector<Point>& points,
                                        std::uint64_t seed) const;

    /// Closed-form E[max(f(x) - best, 0)] under the posterior.
    std::vector<double> expected_improvement(const std::vector<Point>& points,
                                             double best) const;

    const GpHyperparams& hyperparams() const { return params_; }
    double target_mean() const { return y_mean_; }
    double target_std() const { return y_std_; }
    /// Prior variance in original target units.
    double prior_variance() const {
        return params_.signal_variance * y_std_ * y_std_;
    }
    double log_marginal_likelihood() const { return lml_; }
    std::size_t train_size() const { return static_cast<std::size_t>(x_.rows()); }
    const Eigen::VectorXd& standardized_targets() const { return y_std_targets_; }

    /// Log marginal likelihood and its gradient w.r.t. log hyperparameters
    /// (lengthscales..., signal, noise) for the given data. Exposed so the
    /// finite-difference check in the test suite can attack the same code
    /// path the fit uses.
    static double lml_with_gradient(const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& y,
                                    const GpHyperparams& params,
                                    Eigen::VectorXd* grad_out);

private:
    GpModel() = default;
    void finalize(const GpFitOptions& opts);
    void cross_kernel(const Eigen::MatrixXd& query, Eigen::MatrixXd& k) const;
    void posterior_internal(const Eigen::MatrixXd& query, Eigen::VectorXd& mean,
                            Eigen::VectorXd& var, Eigen::MatrixXd* half) const;

    Eigen::MatrixXd x_;            // n x d, normalized inputs
    Eigen::VectorXd y_std_targets_;  // standardized targets
    GpHyperparams params_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;  // K^-1 y
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    double lml_ = 0.0;
    std::size_t thompson_joint_cap_ = 2000;
};

}  // namespace hibo
