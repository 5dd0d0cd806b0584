#include "hibo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "hibo/seeding.hpp"

namespace hibo {

namespace {

constexpr double kPi = std::numbers::pi;

double levy_raw(const std::vector<double>& x) {
    const std::size_t d = x.size();
    auto w = [&](std::size_t i) { return 1.0 + (x[i] - 1.0) / 4.0; };
    double s = std::sin(kPi * w(0));
    double total = s * s;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        double wi = w(i);
        double sw = std::sin(kPi * wi + 1.0);
        total += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * sw * sw);
    }
    double wd = w(d - 1);
    double sd = std::sin(2.0 * kPi * wd);
    total += (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
    return total;
}

double rastrigin_raw(const std::vector<double>& x) {
    double total = 10.0 * static_cast<double>(x.size());
    for (double xi : x) {
        total += xi * xi - 10.0 * std::cos(2.0 * kPi * xi);
    }
    return total;
}

double ackley_raw(const std::vector<double>& x) {
    const double d = static_cast<double>(x.size());
    double sq = 0.0, cs = 0.0;
    for (double xi : x) {
        sq += xi * xi;
        cs += std::cos(2.0 * kPi * xi);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) +
           20.0 + std::numbers::e;
}

double branin_raw(const std::vector<double>& x) {
    const double a = 1.0;
    const double b = 5.1 / (4.0 * kPi * kPi);
    const double c = 5.0 / kPi;
    const double r = 6.0;
    const double s = 10.0;
    const double t = 1.0 / (8.0 * kPi);
    double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return a * u * u + s * (1.0 - t) * std::cos(x[0]) + s;
}

double hartmann6_raw(const std::vector<double>& x) {
    static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
    static const double A[4][6] = {
        {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
        {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
        {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
        {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
    static const double P[4][6] = {
        {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
        {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
        {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
        {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 6; ++j) {
            double diff = x[j] - P[i][j];
            inner += A[i][j] * diff * diff;
        }
        total -= alpha[i] * std::exp(-inner);
    }
    return total;
}

std::vector<Dimension> uniform_box(int dim, double lo, double hi) {
    std::vector<Dimension> dims(dim);
    for (int i = 0; i < dim; ++i) {
        dims[i] = Dimension{"x" + std::to_string(i), lo, hi};
    }
    return dims;
}

}  // namespace

double SyntheticFunction::evaluate_raw(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != intrinsic_dim) {
        throw std::invalid_argument("evaluate_raw: dimensionality mismatch");
    }
    if (name == "levy") return levy_raw(x);
    if (name == "rastrigin") return rastrigin_raw(x);
    if (name == "ackley") return ackley_raw(x);
    if (name == "branin") return branin_raw(x);
    if (name == "hartmann6") return hartmann6_raw(x);
    throw std::invalid_argument("unknown synthetic function '" + name + "'");
}

SyntheticFunction make_function(const std::string& name, int dim) {
    SyntheticFunction f;
    f.name = name;
    if (name == "levy") {
        if (dim < 1) throw std::invalid_argument("levy needs dim >= 1");
        f.intrinsic_dim = dim;
        f.domain = uniform_box(dim, -5.0, 10.0);
        f.optimum_value = 0.0;
        f.optimum_location.assign(dim, 1.0);
    } else if (name == "rastrigin") {
        if (dim < 1) throw std::invalid_argument("rastrigin needs dim >= 1");
        f.intrinsic_dim = dim;
        f.domain = uniform_box(dim, -5.12, 5.12);
        f.optimum_value = 0.0;
        f.optimum_location.assign(dim, 0.0);
    } else if (name == "ackley") {
        if (dim < 1) throw std::invalid_argument("ackley needs dim >= 1");
        f.intrinsic_dim = dim;
        f.domain = uniform_box(dim, -32.768, 32.768);
        f.optimum_value = 0.0;
        f.optimum_location.assign(dim, 0.0);
    } else if (name == "branin") {
        if (dim != 2) throw std::invalid_argument("branin is 2-D");
        f.intrinsic_dim = 2;
        f.domain = {Dimension{"x0", -5.0, 10.0}, Dimension{"x1", 0.0, 15.0}};
        f.optimum_value = 0.39788735772973816;
        f.optimum_location = {kPi, 2.275};
    } else if (name == "hartmann6") {
        if (dim != 6) throw std::invalid_argument("hartmann6 is 6-D");
        f.intrinsic_dim = 6;
        f.domain = uniform_box(6, 0.0, 1.0);
        f.optimum_value = -3.3223680114155156;
        f.optimum_location = {0.20169, 0.150011, 0.476874,
                              0.275332, 0.311652, 0.6573};
    } else {
        throw std::invalid_argument("unknown synthetic function '" + name +
                                    "'");
    }
    return f;
}

EmbeddedBenchmark::EmbeddedBenchmark(SyntheticFunction base, int total_dim)
    : base_(std::move(base)), total_dim_(total_dim) {
    if (total_dim_ < base_.intrinsic_dim) {
        throw std::invalid_argument(
            "embedded benchmark: total_dim must be >= intrinsic_dim");
    }
    role_of_slot_.assign(total_dim_, -1);
    for (int r = 0; r < base_.intrinsic_dim; ++r) role_of_slot_[r] = r;
    rebuild_space();
}

void EmbeddedBenchmark::rebuild_space() {
    std::vector<Dimension> dims(total_dim_);
    for (int i = 0; i < total_dim_; ++i) {
        int role = role_of_slot_[i];
        const Dimension& src =
            role >= 0 ? base_.domain[role]
                      : base_.domain[i % base_.intrinsic_dim];
        dims[i] = Dimension{"x" + std::to_string(i), src.lower, src.upper};
    }
    space_ = SearchSpace(std::move(dims));
}

std::vector<int> EmbeddedBenchmark::effective_slots() const {
    std::vector<int> slots(base_.intrinsic_dim, -1);
    for (int i = 0; i < total_dim_; ++i) {
        if (role_of_slot_[i] >= 0) slots[role_of_slot_[i]] = i;
    }
    return slots;
}

double EmbeddedBenchmark::evaluate(const Point& p) const {
    if (static_cast<int>(p.size()) != total_dim_) {
        throw std::invalid_argument("evaluate: point dimensionality mismatch");
    }
    std::vector<double> raw(base_.intrinsic_dim);
    for (int i = 0; i < total_dim_; ++i) {
        int role = role_of_slot_[i];
        if (role >= 0) {
            const Dimension& d = base_.domain[role];
            raw[role] = d.lower + p[i] * (d.upper - d.lower);
        }
    }
    return -base_.evaluate_raw(raw);
}

double EmbeddedBenchmark::regret_raw(double achieved_raw) const {
    return std::max(0.0, std::abs(base_.optimum_value - achieved_raw));
}

EmbeddedBenchmark EmbeddedBenchmark::perturb_effective_dims(
    std::uint64_t permute_seed) const {
    std::vector<int> slots(total_dim_);
    std::iota(slots.begin(), slots.end(), 0);
    Rng rng(derive_seed(permute_seed, 0, 0, SeedPurpose::permutation));
    std::shuffle(slots.begin(), slots.end(), rng);

    EmbeddedBenchmark out = *this;
    out.role_of_slot_.assign(total_dim_, -1);
    for (int r = 0; r < base_.intrinsic_dim; ++r) {
        out.role_of_slot_[slots[r]] = r;
    }
    out.rebuild_space();
    return out;
}

EmbeddedBenchmark make_benchmark(const std::string& name, int total_dim,
                                 int effective_dim) {
    return EmbeddedBenchmark(make_function(name, effective_dim), total_dim);
}

}  // namespace hibo
