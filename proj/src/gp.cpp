#include "hibo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hibo/seeding.hpp"

namespace hibo {

namespace {

constexpr double kSqrt5 = 2.2360679774997896;

Eigen::MatrixXd to_matrix(const std::vector<Point>& points) {
    if (points.empty()) {
        throw std::invalid_argument("gp: empty point list");
    }
    const std::size_t n = points.size();
    const std::size_t d = points[0].size();
    Eigen::MatrixXd x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].size() != d) {
            throw std::invalid_argument("gp: ragged point list");
        }
        for (std::size_t j = 0; j < d; ++j) x(i, j) = points[i][j];
    }
    return x;
}

/// Pairwise scaled distances r_jk = sqrt(sum_i (a_ji - b_ki)^2 / l_i^2).
Eigen::MatrixXd scaled_distances(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b,
                                 const Eigen::VectorXd& lengthscales) {
    Eigen::MatrixXd za = a * lengthscales.cwiseInverse().asDiagonal();
    Eigen::MatrixXd zb = b * lengthscales.cwiseInverse().asDiagonal();
    Eigen::VectorXd na = za.rowwise().squaredNorm();
    Eigen::VectorXd nb = zb.rowwise().squaredNorm();
    Eigen::MatrixXd sq = na.replicate(1, zb.rows()) +
                         nb.transpose().replicate(za.rows(), 1) -
                         2.0 * (za * zb.transpose());
    return sq.cwiseMax(0.0).cwiseSqrt();
}

/// Matern-5/2 correlation from a distance matrix, in place.
void matern52(Eigen::MatrixXd& r) {
    r = ((1.0 + kSqrt5 * r.array() + (5.0 / 3.0) * r.array().square()) *
         (-kSqrt5 * r.array()).exp())
            .matrix();
}

struct CholResult {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

/// Cholesky with jitter escalation 1e-8 -> 1e-6 -> 1e-4.
CholResult robust_cholesky(Eigen::MatrixXd k) {
    CholResult res;
    res.llt.compute(k);
    if (res.llt.info() == Eigen::Success) return res;
    const double ladder[] = {1e-8, 1e-6, 1e-4};
    for (double jitter : ladder) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        res.llt.compute(kj);
        if (res.llt.info() == Eigen::Success) {
            res.jitter = jitter;
            return res;
        }
    }
    throw std::runtime_error(
        "gp: kernel matrix not positive definite after jitter escalation");
}

struct LogBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

LogBox make_log_box(std::size_t d, const GpFitOptions& opts) {
    LogBox box;
    box.lo.resize(d + 2);
    box.hi.resize(d + 2);
    for (std::size_t i = 0; i < d; ++i) {
        box.lo[i] = std::log(opts.lengthscale_min);
        box.hi[i] = std::log(opts.lengthscale_max);
    }
    box.lo[d] = std::log(opts.signal_min);
    box.hi[d] = std::log(opts.signal_max);
    box.lo[d + 1] = std::log(opts.noise_min);
    box.hi[d + 1] = std::log(opts.noise_max);
    return box;
}

GpHyperparams unpack(const Eigen::VectorXd& theta) {
    const std::size_t d = theta.size() - 2;
    GpHyperparams p;
    p.lengthscales = theta.head(d).array().exp();
    p.signal_variance = std::exp(theta[d]);
    p.noise_variance = std::exp(theta[d + 1]);
    return p;
}

Eigen::VectorXd pack(const GpHyperparams& p) {
    const std::size_t d = p.lengthscales.size();
    Eigen::VectorXd theta(d + 2);
    theta.head(d) = p.lengthscales.array().log();
    theta[d] = std::log(p.signal_variance);
    theta[d + 1] = std::log(p.noise_variance);
    return theta;
}

/// Projected Adam ascent on the log marginal likelihood.
double maximize_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    Eigen::VectorXd& theta, const LogBox& box,
                    const GpFitOptions& opts) {
    const auto clamp = [&](Eigen::VectorXd& t) {
        t = t.cwiseMax(box.lo).cwiseMin(box.hi);
    };
    clamp(theta);

    Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd grad(theta.size());
    Eigen::VectorXd best_theta = theta;
    double best_lml = -std::numeric_limits<double>::infinity();

    for (int step = 0; step < opts.adam_steps; ++step) {
        double lml;
        try {
            lml = GpModel::lml_with_gradient(x, y, unpack(theta), &grad);
        } catch (const std::runtime_error&) {
            break;
        }
        if (lml > best_lml) {
            best_lml = lml;
            best_theta = theta;
        }
        const double b1 = 0.9, b2 = 0.999;
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v.array() + (1.0 - b2) * grad.array().square();
        double c1 = 1.0 - std::pow(b1, step + 1);
        double c2 = 1.0 - std::pow(b2, step + 1);
        theta.array() += opts.adam_lr * (m.array() / c1) /
                         ((v.array() / c2).sqrt() + 1e-8);
        clamp(theta);
    }
    try {
        double lml = GpModel::lml_with_gradient(x, y, unpack(theta), nullptr);
        if (lml > best_lml) {
            best_lml = lml;
            best_theta = theta;
        }
    } catch (const std::runtime_error&) {
    }
    theta = best_theta;
    return best_lml;
}

}  // namespace

double GpModel::lml_with_gradient(const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y,
                                  const GpHyperparams& params,
                                  Eigen::VectorXd* grad_out) {
    const auto n = x.rows();
    const auto d = x.cols();

    Eigen::MatrixXd r = scaled_distances(x, x, params.lengthscales);
    Eigen::MatrixXd g_factor;
    if (grad_out != nullptr) {
        // d k / d log l_i = g_factor .* sq_dist_i / l_i^2 elementwise.
        g_factor = (params.signal_variance * (5.0 / 3.0) *
                    (1.0 + kSqrt5 * r.array()) * (-kSqrt5 * r.array()).exp())
                       .matrix();
    }
    matern52(r);
    Eigen::MatrixXd k = params.signal_variance * r;
    k.diagonal().array() += params.noise_variance;

    CholResult chol = robust_cholesky(std::move(k));
    Eigen::VectorXd alpha = chol.llt.solve(y);

    double lml = -0.5 * y.dot(alpha);
    lml -= chol.llt.matrixLLT().diagonal().array().log().sum();
    lml -= 0.5 * n * std::log(2.0 * std::numbers::pi);

    if (grad_out != nullptr) {
        Eigen::MatrixXd w =
            alpha * alpha.transpose() -
            chol.llt.solve(Eigen::MatrixXd::Identity(n, n));
        grad_out->resize(d + 2);

        // ARD lengthscales: one GEMM for all dimensions.
        Eigen::MatrixXd mtil = w.cwiseProduct(g_factor);
        Eigen::VectorXd s = mtil.rowwise().sum();
        Eigen::MatrixXd p = mtil * x;                      // n x d
        Eigen::MatrixXd xsq = x.array().square().matrix();  // n x d
        for (Eigen::Index i = 0; i < d; ++i) {
            double term = s.dot(xsq.col(i)) - x.col(i).dot(p.col(i));
            double l = params.lengthscales[i];
            (*grad_out)[i] = term / (l * l);
        }
        // Signal: dK/dlog sf2 = sf2 * M.
        (*grad_out)[d] =
            0.5 * params.signal_variance * w.cwiseProduct(r).sum();
        // Noise: dK/dlog sn2 = sn2 * I.
        (*grad_out)[d + 1] = 0.5 * params.noise_variance * w.trace();
    }
    return lml;
}

GpModel GpModel::from_data(const std::vector<Point>& inputs,
                           const std::vector<double>& targets,
                           GpHyperparams params, const GpFitOptions& opts) {
    if (inputs.size() != targets.size()) {
        throw std::invalid_argument("gp: inputs/targets length mismatch");
    }
    if (inputs.size() < 2) {
        throw std::invalid_argument("gp: need at least 2 observations");
    }
    GpModel model;
    model.x_ = to_matrix(inputs);
    Eigen::VectorXd y =
        Eigen::Map<const Eigen::VectorXd>(targets.data(), targets.size());
    model.y_mean_ = y.mean();
    double var = (y.array() - model.y_mean_).square().mean();
    model.y_std_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    model.y_std_targets_ = (y.array() - model.y_mean_) / model.y_std_;
    model.params_ = std::move(params);
    model.finalize(opts);
    return model;
}

void GpModel::finalize(const GpFitOptions& opts) {
    thompson_joint_cap_ = opts.thompson_joint_cap;
    Eigen::MatrixXd r = scaled_distances(x_, x_, params_.lengthscales);
    matern52(r);
    Eigen::MatrixXd k = params_.signal_variance * r;
    k.diagonal().array() += params_.noise_variance;
    CholResult chol = robust_cholesky(std::move(k));
    chol_ = std::move(chol.llt);
    alpha_ = chol_.solve(y_std_targets_);
    lml_ = -0.5 * y_std_targets_.dot(alpha_) -
           chol_.matrixLLT().diagonal().array().log().sum() -
           0.5 * x_.rows() * std::log(2.0 * std::numbers::pi);
}

GpModel GpModel::fit(const std::vector<Point>& inputs,
                     const std::vector<double>& targets, std::uint64_t seed,
                     const GpFitOptions& opts) {
    GpHyperparams def;
    def.lengthscales =
        Eigen::VectorXd::Constant(inputs.empty() ? 0 : inputs[0].size(), 0.5);
    def.signal_variance = 1.0;
    def.noise_variance =
        std::sqrt(opts.noise_min * opts.noise_max);  // geometric middle
    return fit_warm(inputs, targets, seed, def, opts);
}

GpModel GpModel::fit_warm(const std::vector<Point>& inputs,
                          const std::vector<double>& targets,
                          std::uint64_t seed, const GpHyperparams& warm,
                          const GpFitOptions& opts) {
    if (inputs.size() < 2) {
        throw std::invalid_argument("gp: need at least 2 observations");
    }
    GpModel model = from_data(inputs, targets, warm, opts);
    const Eigen::MatrixXd& x = model.x_;
    const Eigen::VectorXd& y = model.y_std_targets_;
    const std::size_t d = inputs[0].size();
    LogBox box = make_log_box(d, opts);

    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    GpHyperparams def;
    def.lengthscales = Eigen::VectorXd::Constant(d, 0.5);
    def.signal_variance = 1.0;
    def.noise_variance = std::sqrt(opts.noise_min * opts.noise_max);

    double best_lml = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta = pack(warm);
    const int restarts = std::max(3, opts.restarts);
    for (int start = 0; start < restarts; ++start) {
        Eigen::VectorXd theta;
        if (start == 0) {
            theta = pack(warm);
        } else if (start == 1) {
            theta = pack(def);
        } else {
            theta.resize(d + 2);
            for (Eigen::Index i = 0; i < theta.size(); ++i) {
                theta[i] = box.lo[i] + unit(rng) * (box.hi[i] - box.lo[i]);
            }
        }
        double lml = maximize_lml(x, y, theta, box, opts);
        if (lml > best_lml) {
            best_lml = lml;
            best_theta = theta;
        }
    }
    model.params_ = unpack(best_theta);
    model.finalize(opts);
    return model;
}

void GpModel::cross_kernel(const Eigen::MatrixXd& query,
                           Eigen::MatrixXd& k) const {
    k = scaled_distances(x_, query, params_.lengthscales);
    matern52(k);
    k *= params_.signal_variance;
}

void GpModel::posterior_internal(const Eigen::MatrixXd& query,
                                 Eigen::VectorXd& mean, Eigen::VectorXd& var,
                                 Eigen::MatrixXd* half) const {
    Eigen::MatrixXd kstar;
    cross_kernel(query, kstar);  // n x m
    mean = kstar.transpose() * alpha_;
    Eigen::MatrixXd v = chol_.matrixL().solve(kstar);  // n x m
    Eigen::VectorXd vnorm = v.colwise().squaredNorm().transpose();
    var = (params_.signal_variance - vnorm.array()).max(0.0).matrix();
    if (half != nullptr) *half = std::move(v);
}

void GpModel::posterior(const std::vector<Point>& points,
                        std::vector<double>& mean_out,
                        std::vector<double>& var_out) const {
    if (points.empty()) {
        throw std::invalid_argument("posterior: empty query");
    }
    Eigen::MatrixXd query = to_matrix(points);
    Eigen::VectorXd mean, var;
    posterior_internal(query, mean, var, nullptr);
    mean_out.resize(points.size());
    var_out.resize(points.size());
    const double scale2 = y_std_ * y_std_;
    for (std::size_t i = 0; i < points.size(); ++i) {
        mean_out[i] = y_mean_ + y_std_ * mean[i];
        var_out[i] = scale2 * var[i];
    }
}

std::vector<double> GpModel::thompson_sample(const std::vector<Point>& points,
                                             std::uint64_t seed) const {
    if (points.empty()) {
        throw std::invalid_argument("thompson_sample: empty query");
    }
    Eigen::MatrixXd query = to_matrix(points);
    const std::size_t m = points.size();
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::VectorXd mean, var;
    std::vector<double> out(m);
    if (m <= thompson_joint_cap_) {
        Eigen::MatrixXd v;
        posterior_internal(query, mean, var, &v);
        Eigen::MatrixXd cov = scaled_distances(query, query, params_.lengthscales);
        matern52(cov);
        cov = params_.signal_variance * cov - v.transpose() * v;
        cov.diagonal().array() += 1e-10;
        CholResult chol = robust_cholesky(std::move(cov));
        Eigen::VectorXd z(m);
        for (std::size_t i = 0; i < m; ++i) z[i] = gauss(rng);
        Eigen::VectorXd draw =
            mean + Eigen::MatrixXd(chol.llt.matrixL()) * z;
        for (std::size_t i = 0; i < m; ++i) {
            out[i] = y_mean_ + y_std_ * draw[i];
        }
    } else {
        posterior_internal(query, mean, var, nullptr);
        for (std::size_t i = 0; i < m; ++i) {
            double draw = mean[i] + std::sqrt(var[i]) * gauss(rng);
            out[i] = y_mean_ + y_std_ * draw;
        }
    }
    return out;
}

std::vector<double> GpModel::expected_improvement(
    const std::vector<Point>& points, double best) const {
    std::vector<double> mean, var;
    posterior(points, mean, var);
    std::vector<double> out(points.size());
    const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double sigma = std::sqrt(std::max(0.0, var[i]));
        double gain = mean[i] - best;
        if (sigma < 1e-12) {
            out[i] = std::max(gain, 0.0);
            continue;
        }
        double u = gain / sigma;
        double pdf = inv_sqrt2pi * std::exp(-0.5 * u * u);
        double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
        out[i] = std::max(0.0, sigma * pdf + gain * cdf);
    }
    return out;
}

}  // namespace hibo
